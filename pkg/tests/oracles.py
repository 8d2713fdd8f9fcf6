"""Independent reference implementations used by the tests.

Nothing here calls into the code under test except for plain data types,
so agreement is evidence of correctness rather than self-consistency.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from relgrl.envs.base import DEFAULT_HORIZON, InstanceSpec, Simulator, register_simulator
from relgrl.features import grammar as g
from relgrl.relational import Domain, GroundAction, GroundFact, ObjectUniverse, RelationalState


# -- description logic by direct quantifier expansion ------------------------

def holds_role(role, x: str, y: str, facts: frozenset) -> bool:
    if isinstance(role, g.PrimitiveRole):
        return GroundFact(role.name, (x, y)) in facts
    if isinstance(role, g.InverseRole):
        return holds_role(role.role, y, x, facts)
    raise TypeError(role)


def holds_concept(c, x: str, facts: frozenset, objects) -> bool:
    if isinstance(c, g.PrimitiveConcept):
        return GroundFact(c.name, (x,)) in facts
    if isinstance(c, g.TopConcept):
        return True
    if isinstance(c, g.NotConcept):
        return not holds_concept(c.concept, x, facts, objects)
    if isinstance(c, g.AndConcept):
        return holds_concept(c.left, x, facts, objects) and holds_concept(c.right, x, facts, objects)
    if isinstance(c, g.ExistsConcept):
        return any(holds_role(c.role, x, y, facts) and holds_concept(c.concept, y, facts, objects)
                   for y in objects)
    if isinstance(c, g.ForallConcept):
        return all((not holds_role(c.role, x, y, facts)) or holds_concept(c.concept, y, facts, objects)
                   for y in objects)
    if isinstance(c, g.RoleEqConcept):
        return all(holds_role(c.left, x, y, facts) == holds_role(c.right, x, y, facts) for y in objects)
    raise TypeError(c)


def concept_oracle(c, state: RelationalState, objects) -> set[str]:
    return {x for x in objects if holds_concept(c, x, state.facts, objects)}


def distance_oracle(d, state: RelationalState, objects) -> int:
    src = concept_oracle(d.source, state, objects)
    dst = concept_oracle(d.target, state, objects)
    n = len(objects)
    if not src or not dst:
        return n
    best = n
    for x in src:
        dist = {x: 0}
        queue = deque([x])
        while queue:
            u = queue.popleft()
            for v in objects:
                if v not in dist and holds_role(d.role, u, v, state.facts):
                    dist[v] = dist[u] + 1
                    queue.append(v)
        for y in dst:
            if y in dist:
                best = min(best, dist[y])
    return best


def feature_oracle(node, state, objects) -> int:
    if isinstance(node, g.DistanceFeature):
        return distance_oracle(node, state, objects)
    return len(concept_oracle(node, state, objects))


# -- closed-form simulator semantics -----------------------------------------

def _unary(state, pred):
    return {f.args[0] for f in state.facts if f.predicate == pred}


def _pairs(state, pred):
    return {f.args for f in state.facts if f.predicate == pred}


def sysadmin_up_prob(state, action, universe) -> dict[str, float]:
    """P(running(c) next) for every computer."""
    running = _unary(state, "running")
    links = _pairs(state, "link")
    out = {}
    for c in universe:
        if action.schema == "reboot" and action.args[0] == c:
            out[c] = 1.0
        elif c in running:
            nbrs = [a for (a, b) in links if b == c]
            up = sum(1 for a in nbrs if a in running)
            out[c] = 0.45 + 0.5 * (1 + up) / (1 + len(nbrs))
        else:
            out[c] = 0.0
    return out


def sysadmin_reward(state, action) -> float:
    return len(_unary(state, "running")) - (0.75 if action.schema == "reboot" else 0.0)


def academic_pass_prob(state, action, universe) -> dict[str, float]:
    passed = _unary(state, "passed")
    pre = _pairs(state, "prereq")
    out = {}
    for c in universe:
        if c in passed:
            out[c] = 1.0
        elif action.schema == "take_course" and action.args[0] == c:
            ps = [p for (p, q) in pre if q == c]
            out[c] = 0.8 * (1 + sum(1 for p in ps if p in passed)) / (1 + len(ps))
        else:
            out[c] = 0.0
    return out


def academic_reward(state, action) -> float:
    passed = _unary(state, "passed")
    if _unary(state, "required") <= passed:
        return 0.0
    r = -1.0
    if action.schema == "take_course":
        c = action.args[0]
        if c in _unary(state, "taken") and c not in passed:
            r -= 5.0
    return r


def life_alive_prob(state, action, universe) -> dict[str, float]:
    alive = _unary(state, "alive")
    nb = _pairs(state, "neighbor")
    out = {}
    for c in universe:
        if action.schema == "set_alive" and action.args[0] == c:
            out[c] = 1.0
            continue
        n = sum(1 for (a, b) in nb if a == c and b in alive)
        rule = (n == 2 or n == 3) if c in alive else n == 3
        out[c] = 0.9 if rule else 0.1
    return out


def life_reward(state, action) -> float:
    return len(_unary(state, "alive")) - (1.0 if action.schema == "set_alive" else 0.0)


def wildfire_burn_prob(state, action, universe) -> dict[str, float]:
    burning = _unary(state, "burning")
    no_fuel = _unary(state, "out_of_fuel")
    nb = _pairs(state, "neighbor")
    out = {}
    for c in universe:
        targeted = action.args and action.args[0] == c
        if action.schema == "put_out" and targeted:
            out[c] = 0.0
        elif c in burning:
            out[c] = 1.0
        elif c in no_fuel or (action.schema == "cut_out" and targeted):
            out[c] = 0.0
        else:
            n = sum(1 for (a, b) in nb if a == c and b in burning)
            out[c] = 1.0 - math.exp(-0.4 * n)
    return out


def wildfire_reward(state, action) -> float:
    return -5.0 * len(_unary(state, "burning")) - (0.0 if action.schema == "nop" else 1.0)


# -- a deterministic chain MDP with an exact model ----------------------------

CHAIN_DOMAIN = "test_chain"


class Chain(Simulator):
    """Positions p0..p{n-1}; ``right``/``left`` move along ``succ`` (walls at the ends).

    Reward is 1 for ``nop`` at the last position and -0.1 for any move.
    """

    name = CHAIN_DOMAIN
    domain = Domain.create(CHAIN_DOMAIN, [("at", 1), ("succ", 2)], [("left", 0), ("nop", 0), ("right", 0)])
    static_predicates = frozenset({"succ"})

    def transition(self, spec, state, action, rng):
        rng.random()
        n = len(spec.universe)
        i = int(next(iter(_unary(state, "at")))[1:])
        if action.schema == "right":
            i = min(i + 1, n - 1)
        elif action.schema == "left":
            i = max(i - 1, 0)
        return self.build_state(spec, [GroundFact("at", (f"p{i}",))])

    def reward(self, spec, state, action):
        last = f"p{len(spec.universe) - 1}"
        if action.schema == "nop":
            return 1.0 if last in _unary(state, "at") else 0.0
        return -0.1

    def size_signature(self):
        return "CHAIN(n)"

    def generate(self, size_params, seed):
        (n,) = size_params
        names = tuple(f"p{i}" for i in range(n))
        static = frozenset(GroundFact("succ", (names[i], names[i + 1])) for i in range(n - 1))
        return InstanceSpec(self.domain, ObjectUniverse(names), frozenset({GroundFact("at", ("p0",))}), static,
                            DEFAULT_HORIZON, seed, name=f"chain_{n}")


register_simulator(Chain())


def chain_model(n: int):
    """Transition table ``nxt[s][a]`` and reward table ``rew[s][a]``; actions left, nop, right."""
    nxt = np.zeros((n, 3), dtype=int)
    rew = np.zeros((n, 3))
    for s in range(n):
        nxt[s] = [max(s - 1, 0), s, min(s + 1, n - 1)]
        rew[s] = [-0.1, 1.0 if s == n - 1 else 0.0, -0.1]
    return nxt, rew


def value_iteration(nxt, rew, gamma: float, tol: float = 1e-13) -> np.ndarray:
    """Optimal Q for a deterministic MDP."""
    q = np.zeros_like(rew)
    while True:
        new = rew + gamma * q.max(axis=1)[nxt]
        if np.abs(new - q).max() < tol:
            return new
        q = new


def policy_value(nxt, rew, policy, gamma: float) -> np.ndarray:
    """Exact state values of a deterministic policy (linear solve)."""
    n = len(policy)
    p = np.zeros((n, n))
    r = np.zeros(n)
    for s, a in enumerate(policy):
        p[s, nxt[s, a]] = 1.0
        r[s] = rew[s, a]
    return np.linalg.solve(np.eye(n) - gamma * p, r)


def chain_state(i: int, n: int) -> RelationalState:
    names = [f"p{k}" for k in range(n)]
    facts = {GroundFact("succ", (names[k], names[k + 1])) for k in range(n - 1)}
    facts.add(GroundFact("at", (names[i],)))
    return RelationalState(frozenset(facts))


CHAIN_ACTIONS = [GroundAction("left"), GroundAction("nop"), GroundAction("right")]


# -- Monte-Carlo marginals ----------------------------------------------------

def mc_check(spec, state, action, predicate: str, probs: dict[str, float], samples: int = 10_000,
             seed: int = 0) -> list[str]:
    """Sample ``samples`` transitions and compare the frequency of ``predicate(o)``
    with ``probs[o]``; returns a description of every violation of the 3-sigma bound."""
    from relgrl.envs.base import get_simulator

    sim = get_simulator(spec.domain.name)
    rng = np.random.default_rng(seed)
    counts = dict.fromkeys(probs, 0)
    for _ in range(samples):
        nxt = sim.transition(spec, state, action, rng)
        for f in nxt.facts:
            if f.predicate == predicate:
                counts[f.args[0]] += 1
    bad = []
    for o, p in probs.items():
        freq = counts[o] / samples
        sigma = math.sqrt(p * (1 - p) / samples)
        if abs(freq - p) > 3 * sigma + 1e-12:
            bad.append(f"{predicate}({o}): freq {freq:.4f} vs p {p:.4f} (3 sigma {3 * sigma:.4f})")
    return bad


# -- exhaustive feature enumeration without pruning --------------------------

def all_trees(domain, k: int):
    """Every concept, role and distance tree of complexity <= k (no dedup, no normalization)."""
    roles = {1: [g.PrimitiveRole(p) for p in domain.binary_predicates]}
    roles[2] = [g.InverseRole(r) for r in roles[1]]
    concepts = {1: [g.PrimitiveConcept(p) for p in domain.unary_predicates] + [g.TopConcept()]}
    for c in range(2, k + 1):
        out = [g.NotConcept(x) for x in concepts[c - 1]]
        for a in range(1, c - 1):
            out += [g.AndConcept(x, y) for x in concepts[a] for y in concepts[c - 1 - a]]
        for cr in (1, 2):
            if 1 <= c - 1 - cr:
                for r in roles[cr]:
                    for x in concepts[c - 1 - cr]:
                        out += [g.ExistsConcept(r, x), g.ForallConcept(r, x)]
            if c - 1 - cr in roles:
                out += [g.RoleEqConcept(r, s) for r in roles[cr] for s in roles[c - 1 - cr]]
        concepts[c] = out
    dists = []
    for cr in (1, 2):
        for r in roles[cr]:
            for a in range(1, k + 1):
                for b in range(1, k + 1):
                    if 1 + a + cr + b <= k:
                        dists += [g.DistanceFeature(x, r, y) for x in concepts[a] for y in concepts[b]]
    return [x for lv in concepts.values() for x in lv], dists


def feature_classes(domain, states, objects, k: int) -> dict:
    """Map denotation signature -> minimum complexity, separately for concepts and distances."""
    cons, dists = all_trees(domain, k)
    out = {}
    for c in cons:
        sig = ("c", tuple(frozenset(concept_oracle(c, s, objects)) for s in states))
        out[sig] = min(out.get(sig, k + 1), c.complexity)
    for d in dists:
        sig = ("d", tuple(distance_oracle(d, s, objects) for s in states))
        out[sig] = min(out.get(sig, k + 1), d.complexity)
    return out
