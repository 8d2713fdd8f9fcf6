import numpy as np
import pytest

import checks
from relgrl.qnet import AdamConfig, QNet, predict, train_minibatch
from relgrl.replay import ReplayEntry


def test_shapes_and_initialization_bounds():
    net = QNet.for_input(10, seed=3)
    assert net.layer_dims == [10, 64, 64, 1]
    assert [w.shape for w in net.weights] == [(10, 64), (64, 64), (64, 1)]
    for w, b in zip(net.weights, net.biases):
        bound = 1 / np.sqrt(w.shape[0])
        assert np.abs(w).max() <= bound and np.abs(b).max() <= bound
    assert net.predict(np.zeros((4, 10))).shape == (4,)


def test_seeded_initialization_is_reproducible():
    assert QNet.for_input(7, seed=1).checksum() == QNet.for_input(7, seed=1).checksum()
    assert QNet.for_input(7, seed=1).checksum() != QNet.for_input(7, seed=2).checksum()


def test_invalid_configurations():
    with pytest.raises(ValueError):
        QNet([4, 8, 2])
    with pytest.raises(ValueError):
        QNet([4])
    with pytest.raises(ValueError, match="columns"):
        QNet.for_input(3).predict(np.zeros((2, 4)))


def test_forward_matches_explicit_computation():
    net = QNet([3, 4, 2, 1], seed=0)
    x = np.array([[1.0, -2.0, 0.5]])
    h = np.maximum(x @ net.weights[0] + net.biases[0], 0)
    h = np.maximum(h @ net.weights[1] + net.biases[1], 0)
    want = (h @ net.weights[2] + net.biases[2])[0, 0]
    assert net.predict(x)[0] == pytest.approx(want, rel=1e-12)
    assert predict(net, x[0, :2], x[0, 2:]) == pytest.approx(want, rel=1e-12)


def test_zero_network_predicts_zero():
    net = QNet.zeros([5, 3, 1])
    assert (net.predict(np.ones((3, 5))) == 0).all()


def test_gradients_match_central_differences():
    errs = checks.gradient_errors(nets=5, seed=11)
    assert max(errs) < 1e-4


def test_adam_three_step_trace():
    # one weight, bias gradient zero; values from the bias-corrected update rule
    net = QNet.zeros([1, 1])
    net.adam = AdamConfig(lr=0.1)
    net.weights[0][0, 0] = 1.0
    for g, want in zip([0.5, -0.2, 0.1], [0.900000002, 0.8654394181165108, 0.8275002408356956]):
        net.adam_step(np.array([g, 0.0]))
        assert net.weights[0][0, 0] == pytest.approx(want, abs=1e-15)
    assert net.biases[0][0] == 0.0 and net.t == 3


def test_adam_accepts_per_parameter_gradients():
    a, b = QNet([3, 4, 1], seed=0), QNet([3, 4, 1], seed=0)
    x, y = np.ones((2, 3)), np.array([1.0, 2.0])
    _, grads = a.loss_and_grads(x, y)
    a.adam_step(grads)
    b.fit_batch(x, y)
    assert np.array_equal(a.flat, b.flat)


def test_regression_loss_decreases():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(64, 4))
    y = x @ np.array([1.0, -2.0, 0.5, 0.0]) + 1.0
    net = QNet.for_input(4, hidden=(16,), seed=0, lr=1e-2)
    first = net.fit_batch(x, y)
    for _ in range(300):
        last = net.fit_batch(x, y)
    assert last < 0.05 * first


def test_train_minibatch_from_replay_entries():
    net = QNet([2, 3, 1], seed=0)
    batch = [ReplayEntry(np.array([1.0]), np.array([0.0]), 1.0), ReplayEntry(np.array([0.0]), np.array([1.0]), -1.0)]
    before = net.checksum()
    loss = train_minibatch(net, batch, lr=0.01)
    assert loss > 0 and net.checksum() != before
    with pytest.raises(ValueError):
        train_minibatch(net, [])


def test_copy_is_independent():
    net = QNet([2, 3, 1], seed=0)
    other = net.copy()
    other.fit_batch(np.ones((1, 2)), np.array([5.0]))
    assert net.checksum() != other.checksum()
    assert net.t == 0 and other.t == 1
