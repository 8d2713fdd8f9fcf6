"""Instance specs, the simulator interface, and the episode loop helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, ClassVar, Iterable, Mapping

import numpy as np

from relgrl.relational import (
    Domain,
    GroundAction,
    GroundFact,
    ObjectUniverse,
    RelationalState,
    ground_actions,
)

DEFAULT_HORIZON = 40


@dataclass(frozen=True)
class InstanceSpec:
    domain: Domain
    universe: ObjectUniverse
    initial_facts: frozenset[GroundFact]
    static_facts: frozenset[GroundFact]
    horizon: int = DEFAULT_HORIZON
    seed: int = 0
    params: tuple[tuple[str, float], ...] = ()
    name: str = field(default="", compare=False)
    _cache: dict = field(default_factory=dict, init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        for f in self.initial_facts | self.static_facts:
            f.validate(self.domain, self.universe)
        known = get_simulator(self.domain.name).default_params
        for k, _ in self.params:
            if k not in known:
                raise ValueError(f"unknown parameter {k!r} for domain {self.domain.name!r}")

    @property
    def param_map(self) -> dict[str, float]:
        m = self._cache.get("params")
        if m is None:
            m = dict(get_simulator(self.domain.name).default_params)
            m.update(self.params)
            self._cache["params"] = m
        return m

    @property
    def actions(self) -> list[GroundAction]:
        acts = self._cache.get("actions")
        if acts is None:
            acts = ground_actions(self.domain, self.universe)
            self._cache["actions"] = acts
        return acts

    def initial_state(self) -> RelationalState:
        return RelationalState(self.initial_facts | self.static_facts)


@dataclass(frozen=True)
class StepResult:
    next_state: RelationalState
    reward: float
    done: bool


class Simulator:
    """Base class for a domain simulator.

    Subclasses define the domain, their default probability/reward constants,
    the set of predicates that change over time, and ``transition``/``reward``.
    Every transition draws the same number of random numbers regardless of the
    state, so trajectories are reproducible for a fixed RNG stream.
    """

    name: ClassVar[str]
    domain: ClassVar[Domain]
    default_params: ClassVar[Mapping[str, float]] = {}
    static_predicates: ClassVar[frozenset[str]] = frozenset()

    def transition(self, spec: InstanceSpec, state: RelationalState, action: GroundAction,
                   rng: np.random.Generator) -> RelationalState:
        raise NotImplementedError

    def reward(self, spec: InstanceSpec, state: RelationalState, action: GroundAction) -> float:
        raise NotImplementedError

    def generate(self, size_params: list[int], seed: int) -> InstanceSpec:
        raise NotImplementedError

    def size_signature(self) -> str:
        raise NotImplementedError

    def default_initial_facts(self, universe: ObjectUniverse) -> set[GroundFact]:
        return set()

    def build_state(self, spec: InstanceSpec, dynamic: Iterable[GroundFact]) -> RelationalState:
        return RelationalState(spec.static_facts.union(dynamic))


_REGISTRY: dict[str, Simulator] = {}


def register_simulator(sim: Simulator) -> Simulator:
    _REGISTRY[sim.name] = sim
    return sim


def get_simulator(name: str) -> Simulator:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unsupported domain {name!r}; known: {sorted(_REGISTRY)}") from None


def known_domains() -> list[str]:
    return sorted(_REGISTRY)


def episode_rng(spec: InstanceSpec, seed: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, seed])


def reset(spec: InstanceSpec, seed: int = 0) -> RelationalState:
    """Initial state of ``spec``; pair with ``episode_rng(spec, seed)`` for the episode stream."""
    return spec.initial_state()


def step(spec: InstanceSpec, state: RelationalState, action: GroundAction,
         rng: np.random.Generator, t: int = 0) -> StepResult:
    """Sample one transition. ``t`` is the index of this step inside the episode."""
    action.validate(spec.domain, spec.universe)
    sim = get_simulator(spec.domain.name)
    r = float(sim.reward(spec, state, action))
    nxt = sim.transition(spec, state, action, rng)
    return StepResult(nxt, r, t + 1 >= spec.horizon)


def generate_instance(domain_name: str, size_params: list[int], seed: int = 0) -> InstanceSpec:
    sim = get_simulator(domain_name)
    params = [int(p) for p in size_params]
    if any(p < 1 for p in params):
        raise ValueError(f"size parameters must be positive, got {params}")
    return sim.generate(params, seed)


class Environment:
    """Stateful episode wrapper around the functional ``reset``/``step`` pair."""

    def __init__(self, spec: InstanceSpec):
        self.spec = spec
        self.state = spec.initial_state()
        self.rng = episode_rng(spec, 0)
        self.t = 0

    def reset(self, seed: int) -> RelationalState:
        self.state = reset(self.spec, seed)
        self.rng = episode_rng(self.spec, seed)
        self.t = 0
        return self.state

    def step(self, action: GroundAction) -> StepResult:
        res = step(self.spec, self.state, action, self.rng, self.t)
        self.state = res.next_state
        self.t += 1
        return res


def rollout(spec: InstanceSpec, policy: Callable[[RelationalState], GroundAction],
            seed: int) -> tuple[list[RelationalState], float]:
    env = Environment(spec)
    s = env.reset(seed)
    states, total = [s], 0.0
    for _ in range(spec.horizon):
        res = env.step(policy(s))
        total += res.reward
        s = res.next_state
        states.append(s)
    return states, total


def sample_state_space(spec: InstanceSpec, episodes: int, seed: int = 0) -> set[RelationalState]:
    """Distinct states visited by uniform-random rollouts; always contains the initial state."""
    out = {spec.initial_state()}
    rng = np.random.default_rng([spec.seed, seed, 7919])
    acts = spec.actions
    for ep in range(episodes):
        env = Environment(spec)
        s = env.reset(seed * 100003 + ep)
        for _ in range(spec.horizon):
            a = acts[int(rng.integers(len(acts)))]
            s = env.step(a).next_state
            out.add(s)
    return out


def dynamic_objects(state: RelationalState, predicate: str) -> set[str]:
    return {f.args[0] for f in state.facts if f.predicate == predicate}
