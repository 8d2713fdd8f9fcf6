"""Denotations of concepts, roles and distance features over a relational state.

Object sets are represented as integer bitmasks over the universe order;
the public helpers convert back to sets of names.
"""

from __future__ import annotations

from typing import Iterable

from relgrl.features.grammar import (
    AndConcept,
    Concept,
    DistanceFeature,
    ExistsConcept,
    Feature,
    ForallConcept,
    InverseRole,
    Node,
    NotConcept,
    PrimitiveConcept,
    PrimitiveRole,
    Role,
    RoleEqConcept,
    TopConcept,
)
from relgrl.relational import Domain, ObjectUniverse, RelationalState


class StateIndex:
    """Bitmask view of one state, with memoized sub-term denotations."""

    def __init__(self, state: RelationalState, universe: ObjectUniverse, domain: Domain | None = None):
        self.universe = universe
        self.n = len(universe)
        self.full = (1 << self.n) - 1
        self.domain = domain
        pos = {o: i for i, o in enumerate(universe.objects)}
        self.pos = pos
        self.unary: dict[str, int] = {}
        self.succ: dict[str, list[int]] = {}
        self.pred: dict[str, list[int]] = {}
        for f in state.facts:
            if len(f.args) == 1:
                self.unary[f.predicate] = self.unary.get(f.predicate, 0) | (1 << pos[f.args[0]])
            elif len(f.args) == 2:
                a, b = pos[f.args[0]], pos[f.args[1]]
                if f.predicate not in self.succ:
                    self.succ[f.predicate] = [0] * self.n
                    self.pred[f.predicate] = [0] * self.n
                self.succ[f.predicate][a] |= 1 << b
                self.pred[f.predicate][b] |= 1 << a
        self._memo: dict = {}

    def _check(self, name: str, arity: int) -> None:
        if self.domain is None:
            return
        try:
            ok = self.domain.predicate_arity(name) == arity
        except KeyError:
            ok = False
        if not ok:
            kind = "unary" if arity == 1 else "binary"
            raise ValueError(f"unknown {kind} predicate {name!r}")

    def role(self, r: Role) -> list[int]:
        if isinstance(r, PrimitiveRole):
            self._check(r.name, 2)
            return self.succ.get(r.name) or [0] * self.n
        if isinstance(r, InverseRole):
            self._check(r.role.name, 2)
            return self.pred.get(r.role.name) or [0] * self.n
        raise TypeError(f"not a role: {r!r}")

    def concept(self, c: Concept) -> int:
        memo = self._memo
        hit = memo.get(c)
        if hit is not None:
            return hit
        if isinstance(c, PrimitiveConcept):
            self._check(c.name, 1)
            m = self.unary.get(c.name, 0)
        elif isinstance(c, TopConcept):
            m = self.full
        elif isinstance(c, NotConcept):
            m = self.full & ~self.concept(c.concept)
        elif isinstance(c, AndConcept):
            m = self.concept(c.left) & self.concept(c.right)
        elif isinstance(c, ExistsConcept):
            inner = self.concept(c.concept)
            m = 0
            for i, s in enumerate(self.role(c.role)):
                if s & inner:
                    m |= 1 << i
        elif isinstance(c, ForallConcept):
            outside = self.full & ~self.concept(c.concept)
            m = 0
            for i, s in enumerate(self.role(c.role)):
                if not s & outside:
                    m |= 1 << i
        elif isinstance(c, RoleEqConcept):
            left, right = self.role(c.left), self.role(c.right)
            m = 0
            for i in range(self.n):
                if left[i] == right[i]:
                    m |= 1 << i
        else:
            raise TypeError(f"not a concept: {c!r}")
        memo[c] = m
        return m

    def distance(self, d: DistanceFeature) -> int:
        hit = self._memo.get(d)
        if hit is not None:
            return hit
        src, dst = self.concept(d.source), self.concept(d.target)
        val = _bfs(self.role(d.role), src, dst, self.n)
        self._memo[d] = val
        return val

    def value(self, node: Node) -> int:
        if isinstance(node, DistanceFeature):
            return self.distance(node)
        return self.concept(node).bit_count()

    def names(self, mask: int) -> frozenset[str]:
        objs = self.universe.objects
        return frozenset(objs[i] for i in range(self.n) if mask >> i & 1)


def _bfs(succ: list[int], src: int, dst: int, n: int) -> int:
    if not src or not dst:
        return n
    if src & dst:
        return 0
    visited = frontier = src
    d = 0
    while frontier:
        d += 1
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= succ[low.bit_length() - 1]
            f ^= low
        nxt &= ~visited
        if nxt & dst:
            return d
        visited |= nxt
        frontier = nxt
    return n


def eval_concept(concept: Concept, state: RelationalState, universe: ObjectUniverse,
                 domain: Domain | None = None) -> frozenset[str]:
    """Set of objects in the denotation of ``concept``.

    When ``domain`` is given, predicate names are checked against it.
    """
    idx = StateIndex(state, universe, domain)
    return idx.names(idx.concept(concept))


def eval_role(role: Role, state: RelationalState, universe: ObjectUniverse) -> frozenset[tuple[str, str]]:
    idx = StateIndex(state, universe)
    objs = universe.objects
    return frozenset((objs[i], objs[j]) for i, s in enumerate(idx.role(role)) for j in range(idx.n) if s >> j & 1)


def eval_distance(source: Concept, role: Role, target: Concept, state: RelationalState,
                  universe: ObjectUniverse) -> int:
    """Fewest ``role``-steps from a ``source`` object to a ``target`` object.

    0 when the denotations intersect; ``len(universe)`` when either is empty
    or no target is reachable.
    """
    return StateIndex(state, universe).distance(DistanceFeature(source, role, target))


def _node(feature) -> Node:
    return feature.node if isinstance(feature, Feature) else feature


def feature_value(feature, state: RelationalState, universe: ObjectUniverse) -> int:
    return StateIndex(state, universe).value(_node(feature))


def object_membership(feature, obj: str, state: RelationalState, universe: ObjectUniverse) -> int:
    node = _node(feature)
    if isinstance(node, DistanceFeature):
        return 0
    if obj not in universe:
        raise ValueError(f"object {obj!r} is not in the universe")
    idx = StateIndex(state, universe)
    return idx.concept(node) >> idx.pos[obj] & 1


def evaluate_all(nodes: Iterable[Node], index: StateIndex) -> list[int]:
    return [index.value(n) for n in nodes]
