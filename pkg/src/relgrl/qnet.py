"""A small numpy multilayer perceptron trained with MSE loss and Adam."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

DEFAULT_HIDDEN = (64, 64)


@dataclass
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


class QNet:
    """Fully connected ReLU network with a scalar linear output.

    ``weights[i]`` has shape ``(layer_dims[i], layer_dims[i + 1])``. All
    parameters live in the flat vector ``flat``; ``weights``/``biases`` are
    views into it, and the Adam moments are stored the same way so that a
    checkpoint captures the full optimizer state.
    """

    def __init__(self, layer_dims, seed: int = 0, adam: AdamConfig | None = None):
        dims = [int(d) for d in layer_dims]
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ValueError(f"invalid layer sizes {dims}")
        if dims[-1] != 1:
            raise ValueError("the output layer must have exactly one unit")
        self.layer_dims = dims
        self.adam = adam or AdamConfig()
        self._allocate()
        rng = np.random.default_rng(seed)
        for w, b in zip(self.weights, self.biases):
            bound = 1.0 / np.sqrt(w.shape[0])
            w[...] = rng.uniform(-bound, bound, size=w.shape)
            b[...] = rng.uniform(-bound, bound, size=b.shape)

    def _allocate(self) -> None:
        shapes = []
        for fan_in, fan_out in zip(self.layer_dims[:-1], self.layer_dims[1:]):
            shapes.extend(((fan_in, fan_out), (fan_out,)))
        self._shapes = shapes
        self.flat = np.zeros(sum(int(np.prod(sh)) for sh in shapes))
        self._grad = np.zeros_like(self.flat)
        self._views = self._split(self.flat)
        self._grad_views = self._split(self._grad)
        self.weights = self._views[0::2]
        self.biases = self._views[1::2]
        self.reset_optimizer()

    def _split(self, vec: np.ndarray) -> list[np.ndarray]:
        out, pos = [], 0
        for sh in self._shapes:
            n = int(np.prod(sh))
            out.append(vec[pos: pos + n].reshape(sh))
            pos += n
        return out

    @classmethod
    def for_input(cls, input_dim: int, hidden=DEFAULT_HIDDEN, seed: int = 0, lr: float = 1e-3) -> "QNet":
        return cls([input_dim, *hidden, 1], seed=seed, adam=AdamConfig(lr=lr))

    @classmethod
    def zeros(cls, layer_dims) -> "QNet":
        net = cls(layer_dims)
        net.flat[...] = 0.0
        return net

    def reset_optimizer(self) -> None:
        self.m_flat = np.zeros_like(self.flat)
        self.v_flat = np.zeros_like(self.flat)
        self.m = self._split(self.m_flat)
        self.v = self._split(self.v_flat)
        self.t = 0

    def parameters(self) -> list[np.ndarray]:
        """Weights and biases interleaved: W0, b0, W1, b1, ..."""
        return list(self._views)

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    def copy(self) -> "QNet":
        other = QNet.__new__(QNet)
        other.layer_dims = list(self.layer_dims)
        other.adam = AdamConfig(**vars(self.adam))
        other._allocate()
        other.flat[...] = self.flat
        other.m_flat[...] = self.m_flat
        other.v_flat[...] = self.v_flat
        other.t = self.t
        return other

    def checksum(self) -> int:
        return zlib.crc32(self.flat.tobytes())

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ValueError(f"expected inputs with {self.input_dim} columns, got shape {x.shape}")
        return x

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Returns outputs of shape (n,) and the layer activations needed for backprop."""
        h = self._check_input(x)
        acts = [h]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                np.maximum(h, 0.0, out=h)
            acts.append(h)
        return h[:, 0], acts

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def _backward(self, x: np.ndarray, y: np.ndarray) -> float:
        """MSE loss; leaves its gradient in ``self._grad``."""
        out, acts = self.forward(x)
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        diff = out - y
        n = diff.shape[0]
        loss = float(diff @ diff) / n
        delta = (2.0 / n) * diff[:, None]
        gv = self._grad_views
        for i in range(len(self.weights) - 1, -1, -1):
            np.matmul(acts[i].T, delta, out=gv[2 * i])
            np.sum(delta, axis=0, out=gv[2 * i + 1])
            if i > 0:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0.0)
        return loss

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray) -> tuple[float, list[np.ndarray]]:
        """Mean squared error over the batch and its gradient, one array per entry of ``parameters()``."""
        loss = self._backward(x, y)
        return loss, [g.copy() for g in self._grad_views]

    def adam_step(self, grads, lr: float | None = None) -> None:
        """Adam update from a flat gradient vector or a list matching ``parameters()``."""
        if isinstance(grads, np.ndarray):
            g = grads
        else:
            g = np.concatenate([np.asarray(x, dtype=np.float64).reshape(-1) for x in grads])
        cfg = self.adam
        lr = cfg.lr if lr is None else lr
        self.t += 1
        c1 = 1.0 - cfg.beta1 ** self.t
        c2 = 1.0 - cfg.beta2 ** self.t
        m, v = self.m_flat, self.v_flat
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * (g * g)
        denom = v / c2
        np.sqrt(denom, out=denom)
        denom += cfg.eps
        step = m * (lr / c1)
        step /= denom
        self.flat -= step

    def fit_batch(self, x: np.ndarray, y: np.ndarray, lr: float | None = None) -> float:
        """One Adam step on the batch; returns the loss before the step."""
        loss = self._backward(x, y)
        self.adam_step(self._grad, lr)
        return loss


def predict(net: QNet, state_vec: np.ndarray, action_vec: np.ndarray) -> float:
    x = np.concatenate([np.asarray(state_vec, dtype=np.float64), np.asarray(action_vec, dtype=np.float64)])
    return float(net.predict(x)[0])


def train_minibatch(net: QNet, batch, lr: float | None = None) -> float:
    """One Adam step of MSE regression on replay entries ``(state, action, target)``."""
    if not len(batch):
        raise ValueError("empty minibatch")
    x = np.stack([np.concatenate([e.state, e.action]) for e in batch])
    y = np.array([e.target for e in batch])
    return net.fit_batch(x, y, lr)
