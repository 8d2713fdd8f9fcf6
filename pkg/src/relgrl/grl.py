"""Generalized reinforcement learning: tabular Q-learning warm-started from a QNet.

Every Q-table entry is created the first time it is read, from the network's
current prediction for the abstract (state, action) vector. After that the
entry is only changed by the Q-learning update. Each update also pushes the
abstract vectors and the updated value to a replay buffer from which the
network is trained at a fixed interval.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from relgrl.encoding import Encoder, EncodingLayout
from relgrl.envs.base import InstanceSpec, episode_rng, generate_instance, sample_state_space, step
from relgrl.features.enumerate import enumerate_features
from relgrl.qnet import DEFAULT_HIDDEN, QNet
from relgrl.relational import GroundAction, RelationalState, canonical_state_key
from relgrl.replay import ReplayBuffer

log = logging.getLogger(__name__)

POSITIVE_REWARD_DOMAINS = ("sysadmin", "game_of_life")


@dataclass(frozen=True)
class Hyper:
    gamma: float = 0.9
    alpha: float = 0.05
    epsilon: float = 0.1
    epsilon_decay: float = 1.0  # multiplicative, applied after every episode
    epsilon_min: float = 0.0
    train_interval: int = 32
    opt_steps: int = 25
    minibatch: int = 32
    buffer_size: int = 20000
    episodes: int = 1250
    horizon: int | None = None  # None: use the instance horizon
    lr: float = 1e-3
    hidden: tuple[int, ...] = DEFAULT_HIDDEN
    feature_complexity: int = 5
    sample_episodes: int = 100
    clear_buffer_per_stage: bool = False
    normalize: bool = False

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.alpha <= 0 or self.lr <= 0:
            raise ValueError("learning rates must be positive")
        if not 0.0 <= self.epsilon <= 1.0 or not 0.0 < self.epsilon_decay <= 1.0:
            raise ValueError("epsilon must lie in [0, 1] and its decay in (0, 1]")
        for name in ("train_interval", "minibatch", "buffer_size", "feature_complexity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.opt_steps < 0 or self.episodes < 0 or self.sample_episodes < 0:
            raise ValueError("opt_steps, episodes and sample_episodes must be non-negative")

    @classmethod
    def for_domain(cls, domain_name: str, **overrides) -> "Hyper":
        """Defaults of the training protocol: gamma/alpha depend on the reward sign of the domain."""
        if domain_name in POSITIVE_REWARD_DOMAINS:
            base = cls(gamma=0.9, alpha=0.05)
        else:
            base = cls(gamma=1.0, alpha=0.3)
        return replace(base, **overrides)

    @classmethod
    def qlearning_baseline(cls, domain_name: str, **overrides) -> "Hyper":
        return cls.for_domain(domain_name, epsilon=1.0, epsilon_decay=0.997, **overrides)

    def epsilon_at(self, episode: int) -> float:
        return max(self.epsilon_min, self.epsilon * self.epsilon_decay ** episode)


@dataclass
class EpisodeRecord:
    episode: int
    ret: float
    epsilon: float
    loss: float


class _Row:
    __slots__ = ("values", "known", "inputs")

    def __init__(self, n: int):
        self.values = np.zeros(n)
        self.known = np.zeros(n, dtype=bool)
        self.inputs: np.ndarray | None = None


class GrlSession:
    """Q-table, replay buffer and network handle for one GRL run on one instance.

    With ``net=None`` the table is zero-initialized and no network is trained,
    which gives plain tabular Q-learning.
    """

    def __init__(self, spec: InstanceSpec, net: QNet | None, layout: EncodingLayout | None,
                 hyper: Hyper, seed: int = 0, buffer: ReplayBuffer | None = None):
        self.spec = spec
        self.net = net
        self.layout = layout
        self.hyper = hyper
        self.seed = seed
        self.actions: list[GroundAction] = spec.actions
        self.action_index = {a: i for i, a in enumerate(self.actions)}
        self.rng = np.random.default_rng([seed, 0x5EED])
        self.table: dict[str, _Row] = {}
        self.buffer = buffer if buffer is not None else ReplayBuffer(hyper.buffer_size)
        self.encoder = None
        if net is not None:
            if layout is None:
                raise ValueError("a layout is required together with a network")
            layout.check_domain(spec.domain)
            if net.input_dim != layout.input_dim:
                raise ValueError(f"network input {net.input_dim} != layout input {layout.input_dim}")
            self.encoder = Encoder(layout, spec.universe, normalize=hyper.normalize)
        self.init_count = 0
        self.steps = 0
        self.train_losses: list[float] = []
        self.records: list[EpisodeRecord] = []

    # -- table access -------------------------------------------------------

    def _row(self, state: RelationalState, key: str | None = None) -> tuple[str, _Row]:
        key = key if key is not None else canonical_state_key(state)
        row = self.table.get(key)
        if row is None:
            row = _Row(len(self.actions))
            self.table[key] = row
        if self.encoder is not None and row.inputs is None:
            row.inputs = self.encoder.inputs(state, self.actions, key)
        return key, row

    def _initialize(self, row: _Row, idx: np.ndarray) -> None:
        if self.net is not None and len(idx):
            x = row.inputs[idx]
            uniq, inverse = np.unique(x, axis=0, return_inverse=True)
            row.values[idx] = self.net.predict(uniq)[inverse.reshape(-1)]
        row.known[idx] = True
        self.init_count += len(idx)

    def lookup_q(self, state: RelationalState, action: GroundAction, key: str | None = None) -> float:
        _, row = self._row(state, key)
        i = self.action_index[action]
        if not row.known[i]:
            self._initialize(row, np.array([i]))
        return float(row.values[i])

    def q_values(self, state: RelationalState, key: str | None = None) -> np.ndarray:
        """Q-values of every ground action in ``state`` (creating missing entries)."""
        _, row = self._row(state, key)
        if not row.known.all():
            self._initialize(row, np.flatnonzero(~row.known))
        return row.values

    def greedy_index(self, state: RelationalState, key: str | None = None) -> int:
        q = self.q_values(state, key)
        best = np.flatnonzero(q == q.max())
        if len(best) == 1:
            return int(best[0])
        return int(best[self.rng.integers(len(best))])

    def epsilon_greedy_index(self, state: RelationalState, epsilon: float, key: str | None = None) -> int:
        if self.rng.random() < epsilon:
            return int(self.rng.integers(len(self.actions)))
        return self.greedy_index(state, key)

    # -- learning -----------------------------------------------------------

    def td_update(self, s: RelationalState, a: GroundAction, r: float, s_next: RelationalState,
                  terminal: bool = False, key: str | None = None, key_next: str | None = None) -> float:
        """Q(s,a) += alpha * delta with delta = r + gamma * max_a' Q(s',a') - Q(s,a); returns delta."""
        q_sa = self.lookup_q(s, a, key)
        future = 0.0 if terminal else self.hyper.gamma * float(self.q_values(s_next, key_next).max())
        delta = r + future - q_sa
        _, row = self._row(s, key)
        i = self.action_index[a]
        row.values[i] = q_sa + self.hyper.alpha * delta
        if self.net is not None:
            x = row.inputs[i]
            sd = self.layout.state_dim
            self.buffer.push(x[:sd], x[sd:], row.values[i])
        return delta

    def train_network(self) -> float:
        if self.net is None or len(self.buffer) == 0 or self.hyper.opt_steps == 0:
            return math.nan
        total = 0.0
        for _ in range(self.hyper.opt_steps):
            x, y = self.buffer.sample_arrays(self.hyper.minibatch, self.rng)
            total += self.net.fit_batch(x, y, self.hyper.lr)
        loss = total / self.hyper.opt_steps
        self.train_losses.append(loss)
        return loss

    def run_episode(self, episode: int, epsilon: float) -> EpisodeRecord:
        spec, hyper = self.spec, self.hyper
        horizon = hyper.horizon or spec.horizon
        rng = episode_rng(spec, self.seed * 1_000_003 + episode)
        s = spec.initial_state()
        key = canonical_state_key(s)
        total = 0.0
        losses = []
        for t in range(horizon):
            i = self.epsilon_greedy_index(s, epsilon, key)
            a = self.actions[i]
            res = step(spec, s, a, rng, t)
            s2 = res.next_state
            key2 = canonical_state_key(s2)
            # past the horizon only discounted problems bootstrap
            last = t + 1 >= horizon
            self.td_update(s, a, res.reward, s2, terminal=last and hyper.gamma >= 1.0, key=key, key_next=key2)
            total += res.reward
            self.steps += 1
            if self.net is not None and self.steps % hyper.train_interval == 0:
                losses.append(self.train_network())
            s, key = s2, key2
        rec = EpisodeRecord(episode, total, epsilon, float(np.mean(losses)) if losses else math.nan)
        self.records.append(rec)
        return rec

    def run(self, episodes: int | None = None,
            on_episode: Callable[[EpisodeRecord], None] | None = None) -> None:
        n = self.hyper.episodes if episodes is None else episodes
        for ep in range(n):
            rec = self.run_episode(ep, self.hyper.epsilon_at(ep))
            if on_episode is not None:
                on_episode(rec)

    def q_table(self) -> dict[tuple[str, GroundAction], float]:
        out = {}
        for key, row in self.table.items():
            for i in np.flatnonzero(row.known):
                out[(key, self.actions[i])] = float(row.values[i])
        return out


def lookup_q(session: GrlSession, state: RelationalState, action: GroundAction) -> float:
    return session.lookup_q(state, action)


def td_update(session: GrlSession, s: RelationalState, a: GroundAction, r: float,
              s_next: RelationalState, terminal: bool = False) -> float:
    return session.td_update(s, a, r, s_next, terminal)


def run_grl(spec: InstanceSpec, net: QNet, layout: EncodingLayout, hyper: Hyper, seed: int = 0,
            buffer: ReplayBuffer | None = None,
            on_episode: Callable[[EpisodeRecord], None] | None = None) -> tuple[GrlSession, QNet]:
    """Train on ``spec`` for ``hyper.episodes`` episodes; ``net`` is updated in place.

    Returns the session (holding the task-specific Q-table and the episode
    records) and the network.
    """
    session = GrlSession(spec, net, layout, hyper, seed, buffer)
    session.run(on_episode=on_episode)
    return session, net


def run_qlearning_baseline(spec: InstanceSpec, hyper: Hyper, seed: int = 0) -> GrlSession:
    """Tabular Q-learning from a zero table with the epsilon schedule of ``hyper``."""
    session = GrlSession(spec, None, None, hyper, seed)
    session.run()
    return session


@dataclass(frozen=True)
class CurriculumStage:
    domain_name: str
    size_params: tuple[int, ...]
    episode_budget: int = 1250

    def instance(self, seed: int) -> InstanceSpec:
        return generate_instance(self.domain_name, list(self.size_params), seed)


@dataclass
class StageResult:
    stage: CurriculumStage
    spec: InstanceSpec
    records: list[EpisodeRecord]
    states_seen: int


@dataclass
class LeapfrogResult:
    net: QNet
    layout: EncodingLayout
    buffer: ReplayBuffer
    stages: list[StageResult] = field(default_factory=list)


def build_layout(spec: InstanceSpec, hyper: Hyper, seed: int = 0) -> EncodingLayout:
    """Enumerate features over a random-walk sample of ``spec`` and fix the encoding layout."""
    samples = sample_state_space(spec, hyper.sample_episodes, seed)
    features = enumerate_features(spec.domain, samples, hyper.feature_complexity, spec.universe)
    return EncodingLayout.for_domain(spec.domain, features)


def run_leapfrog(stages: list[CurriculumStage], hyper: Hyper, seed: int = 0,
                 layout: EncodingLayout | None = None, net: QNet | None = None,
                 before_stage: Callable[[int, InstanceSpec, QNet, EncodingLayout], None] | None = None,
                 on_episode: Callable[[int, EpisodeRecord], None] | None = None) -> LeapfrogResult:
    """Run GRL on generated instances of increasing size, threading one network through.

    Features come from the state space sampled on the first stage unless a
    ``layout`` is given; the network starts untrained unless ``net`` is given.
    """
    if not stages:
        raise ValueError("at least one curriculum stage is required")
    specs = [st.instance(seed + i) for i, st in enumerate(stages)]
    if layout is None:
        layout = build_layout(specs[0], hyper, seed)
    if net is None:
        net = QNet.for_input(layout.input_dim, hyper.hidden, seed=seed, lr=hyper.lr)
    buffer = ReplayBuffer(hyper.buffer_size)
    result = LeapfrogResult(net, layout, buffer)
    for i, (stage, spec) in enumerate(zip(stages, specs)):
        if before_stage is not None:
            before_stage(i, spec, net, layout)
        if hyper.clear_buffer_per_stage:
            buffer.clear()
        stage_hyper = replace(hyper, episodes=stage.episode_budget)
        cb = (lambda rec, i=i: on_episode(i, rec)) if on_episode is not None else None
        session, _ = run_grl(spec, net, layout, stage_hyper, seed=seed * 7919 + i, buffer=buffer, on_episode=cb)
        log.info("stage %d %s: %d episodes, %d states", i, spec.name, stage.episode_budget, len(session.table))
        result.stages.append(StageResult(stage, spec, session.records, len(session.table)))
    return result
