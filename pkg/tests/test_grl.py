import numpy as np
import pytest

import checks
import oracles
from relgrl.encoding import EncodingLayout
from relgrl.envs import generate_instance
from relgrl.features import Feature, PrimitiveConcept
from relgrl.grl import (
    CurriculumStage,
    GrlSession,
    Hyper,
    build_layout,
    lookup_q,
    run_grl,
    run_leapfrog,
    run_qlearning_baseline,
    td_update,
)
from relgrl.harness import evaluate_random, evaluate_zero_shot
from relgrl.qnet import QNet
from relgrl.relational import GroundAction, RelationalState, action, fact

SYS3 = generate_instance("sysadmin", [3], 0)
F_UP = Feature(PrimitiveConcept("running"), 0)
LAYOUT = EncodingLayout.for_domain(SYS3.domain, [F_UP])


def _zero_session(hyper=None):
    return GrlSession(SYS3, QNet.zeros([LAYOUT.input_dim, 4, 1]), LAYOUT, hyper or Hyper.for_domain("sysadmin"))


def test_hyper_defaults_per_domain():
    assert (Hyper.for_domain("sysadmin").gamma, Hyper.for_domain("sysadmin").alpha) == (0.9, 0.05)
    assert (Hyper.for_domain("game_of_life").gamma, Hyper.for_domain("game_of_life").alpha) == (0.9, 0.05)
    for name in ("wildfire", "academic_advising"):
        h = Hyper.for_domain(name)
        assert (h.gamma, h.alpha) == (1.0, 0.3)
    h = Hyper()
    assert (h.epsilon, h.buffer_size, h.minibatch, h.train_interval, h.opt_steps) == (0.1, 20000, 32, 32, 25)
    with pytest.raises(ValueError):
        Hyper(gamma=0.0)


def test_qlearning_epsilon_schedule():
    h = Hyper.qlearning_baseline("sysadmin")
    for t in (0, 1, 10, 500):
        assert h.epsilon_at(t) == pytest.approx(0.997 ** t, rel=1e-12)


def test_first_lookup_uses_zero_network():
    sess = _zero_session()
    s = SYS3.initial_state()
    assert lookup_q(sess, s, GroundAction("nop")) == 0.0
    assert sess.init_count == 1


def test_td_update_substitution_example():
    sess = _zero_session()
    s = SYS3.initial_state()
    delta = td_update(sess, s, GroundAction("nop"), 1.0, s)
    assert delta == 1.0
    assert lookup_q(sess, s, GroundAction("nop")) == pytest.approx(0.05)


def test_lookup_after_update_is_not_reinitialized():
    net = QNet.for_input(LAYOUT.input_dim, seed=0)
    sess = GrlSession(SYS3, net, LAYOUT, Hyper.for_domain("sysadmin"))
    s = SYS3.initial_state()
    a = action("reboot", "c1")
    td_update(sess, s, a, 3.0, s)
    updated = lookup_q(sess, s, a)
    net.fit_batch(np.ones((1, LAYOUT.input_dim)), np.array([100.0]))
    assert lookup_q(sess, s, a) == updated


def test_fixed_point_gives_zero_delta():
    sess = _zero_session()
    s = SYS3.initial_state()
    a = GroundAction("nop")
    sess.q_values(s)
    key = s.key()
    sess.table[key].values[:] = 0.0
    delta = td_update(sess, s, a, 0.0, s)
    assert delta == 0.0 and lookup_q(sess, s, a) == 0.0


def test_same_abstract_inputs_get_same_initial_values():
    net = QNet.for_input(LAYOUT.input_dim, seed=5)
    sess = GrlSession(SYS3, net, LAYOUT, Hyper.for_domain("sysadmin"))
    s1 = RelationalState(SYS3.static_facts | {fact("running", "c0")})
    s2 = RelationalState(SYS3.static_facts | {fact("running", "c2")})
    # both are "one computer up"; rebooting a down computer encodes identically
    assert lookup_q(sess, s1, action("reboot", "c1")) == lookup_q(sess, s2, action("reboot", "c0"))
    assert lookup_q(sess, s1, GroundAction("nop")) == lookup_q(sess, s2, GroundAction("nop"))


def test_replay_targets_are_post_update_values():
    sess = _zero_session()
    s = SYS3.initial_state()
    a = action("reboot", "c0")
    td_update(sess, s, a, 2.0, s)
    entry = sess.buffer.entries[-1]
    assert entry.target == lookup_q(sess, s, a) == pytest.approx(0.1)
    assert entry.state.tolist() == [3.0]
    assert entry.action.tolist() == [0.0, 1.0, 1.0]


def test_two_state_chain_converges_to_value_iteration():
    n, gamma = 2, 0.9
    spec = generate_instance(oracles.CHAIN_DOMAIN, [n], 0)
    nxt, rew = oracles.chain_model(n)
    q_star = oracles.value_iteration(nxt, rew, gamma)
    sess = GrlSession(spec, None, None, Hyper(gamma=gamma, alpha=0.5))
    states = [oracles.chain_state(i, n) for i in range(n)]
    for _ in range(400):
        for i, s in enumerate(states):
            for j, a in enumerate(oracles.CHAIN_ACTIONS):
                sess.td_update(s, a, rew[i, j], states[nxt[i, j]])
    got = np.array([sess.q_values(s) for s in states])
    assert np.abs(got - q_star).max() < 1e-6


def test_qlearning_baseline_matches_oracle_and_is_deterministic():
    n, gamma = 3, 0.9
    spec = generate_instance(oracles.CHAIN_DOMAIN, [n], 0)
    nxt, rew = oracles.chain_model(n)
    q_star = oracles.value_iteration(nxt, rew, gamma)
    h = Hyper(gamma=gamma, alpha=0.5, epsilon=1.0, episodes=400)
    a = run_qlearning_baseline(spec, h, seed=3)
    got = np.array([a.q_values(oracles.chain_state(i, n)) for i in range(n)])
    assert np.abs(got - q_star).max() < 1e-6
    b = run_qlearning_baseline(spec, h, seed=3)
    assert a.q_table() == b.q_table()


def test_greedy_policies_reach_optimal_value_on_chain():
    for rep in checks.chain_convergence(episodes=200):
        assert rep.value_gap < 1e-3, rep


def test_zero_budget_leaves_everything_untouched():
    net = QNet.for_input(LAYOUT.input_dim, seed=0)
    before = net.checksum()
    sess, out = run_grl(SYS3, net, LAYOUT, Hyper.for_domain("sysadmin", episodes=0))
    assert out is net and net.checksum() == before and sess.q_table() == {}


def test_lazy_init_at_most_once_per_pair():
    net = QNet.for_input(LAYOUT.input_dim, seed=0)
    sess, _ = run_grl(SYS3, net, LAYOUT, Hyper.for_domain("sysadmin", episodes=30))
    assert sess.init_count == len(sess.q_table())
    assert sess.steps == 30 * SYS3.horizon
    # training ran every train_interval steps
    assert len(sess.train_losses) == sess.steps // 32


def test_run_grl_is_deterministic():
    def once():
        net = QNet.for_input(LAYOUT.input_dim, seed=1)
        sess, _ = run_grl(SYS3, net, LAYOUT, Hyper.for_domain("sysadmin", episodes=20), seed=4)
        return net.checksum(), [r.ret for r in sess.records], sess.buffer.checksum()
    assert once() == once()


def test_single_stage_leapfrog_equals_run_grl():
    hyper = Hyper.for_domain("sysadmin", episodes=15, sample_episodes=20)
    res = run_leapfrog([CurriculumStage("sysadmin", (3,), 15)], hyper, seed=2)
    spec = CurriculumStage("sysadmin", (3,)).instance(2)
    layout = build_layout(spec, hyper, 2)
    net = QNet.for_input(layout.input_dim, hyper.hidden, seed=2)
    sess, _ = run_grl(spec, net, layout, hyper, seed=2 * 7919)
    assert res.layout == layout
    assert res.net.checksum() == net.checksum()
    assert [r.ret for r in res.stages[0].records] == [r.ret for r in sess.records]


def test_leapfrog_net_accepts_large_instances():
    hyper = Hyper.for_domain("sysadmin", sample_episodes=20)
    stages = [CurriculumStage("sysadmin", (n,), 5) for n in (3, 4, 6)]
    res = run_leapfrog(stages, hyper, seed=0)
    big = generate_instance("sysadmin", [50], 0)
    sess = GrlSession(big, res.net, res.layout, hyper)
    assert sess.q_values(big.initial_state()).shape == (51,)
    assert len(res.buffer) == sum(len(st.records) for st in res.stages) * 40
    with pytest.raises(ValueError):
        run_leapfrog([], hyper)


def test_buffer_can_be_cleared_between_stages():
    hyper = Hyper.for_domain("sysadmin", sample_episodes=20, clear_buffer_per_stage=True)
    res = run_leapfrog([CurriculumStage("sysadmin", (n,), 3) for n in (3, 4)], hyper, seed=0)
    assert len(res.buffer) == 3 * 40


def test_learned_policy_reboots_and_transfers():
    """SYS(3) for 1250 episodes: a lone running computer leads to rebooting a down one."""
    hits = 0
    warm_grl, rnd = [], []
    for seed in range(10):
        hyper = Hyper.for_domain("sysadmin")
        res = run_leapfrog([CurriculumStage("sysadmin", (3,), 1250)], hyper, seed=seed)
        spec = res.stages[0].spec
        sess = GrlSession(spec, res.net, res.layout, hyper, seed=seed)
        s = RelationalState(spec.static_facts | {fact("running", "c0")})
        best = spec.actions[int(np.argmax(sess.q_values(s)))]
        hits += best.schema == "reboot" and best.args[0] != "c0"
        if seed < 3:
            sys5 = generate_instance("sysadmin", [5], 500 + seed)
            warm_grl.append(evaluate_zero_shot(res.net, res.layout, sys5, 100, seed).mean)
            rnd.append(evaluate_random(sys5, 100, seed).mean)
    assert hits >= 9
    assert np.mean(warm_grl) > np.mean(rnd)
