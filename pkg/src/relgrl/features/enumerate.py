"""Complexity-bounded, bottom-up enumeration of features over sampled states.

Candidates are generated level by level from the representatives retained at
lower levels. A candidate is kept only if its denotation signature (its
denotation in every sampled state) is new; since lower levels come first and
each level is visited in serialized order, the survivor of every equivalence
class is the lowest-complexity, lexicographically smallest candidate.
"""

from __future__ import annotations

import logging
from typing import Iterable

from relgrl.features.evaluate import StateIndex
from relgrl.features.grammar import (
    TOP,
    Concept,
    DistanceFeature,
    ExistsConcept,
    Feature,
    ForallConcept,
    InverseRole,
    NotConcept,
    PrimitiveConcept,
    PrimitiveRole,
    Role,
    conj,
    role_eq,
    sort_key,
)
from relgrl.relational import Domain, ObjectUniverse, RelationalState, canonical_state_key

log = logging.getLogger(__name__)


def _universe_of(samples: Iterable[RelationalState]) -> ObjectUniverse:
    objs = sorted({o for s in samples for f in s.facts for o in f.args})
    return ObjectUniverse(tuple(objs))


def enumerate_features(domain: Domain, samples: Iterable[RelationalState], k: int,
                       universe: ObjectUniverse | None = None) -> list[Feature]:
    """All features of complexity <= ``k``, one per denotation class over ``samples``.

    The result is ordered by (complexity, serialized form) and ids are assigned
    in that order. ``universe`` defaults to the objects mentioned in the samples.
    """
    samples = sorted(set(samples), key=canonical_state_key)
    if not samples:
        raise ValueError("need at least one sampled state")
    if k < 1:
        raise ValueError("complexity bound must be >= 1")
    if universe is None:
        universe = _universe_of(samples)
    indices = [StateIndex(s, universe) for s in samples]

    def concept_sig(c: Concept) -> tuple[int, ...]:
        return tuple(ix.concept(c) for ix in indices)

    def role_sig(r: Role) -> tuple:
        return tuple(tuple(ix.role(r)) for ix in indices)

    seen_concepts: set[tuple] = set()
    concepts: dict[int, list[Concept]] = {c: [] for c in range(1, k + 1)}

    def offer(c: Concept) -> None:
        sig = concept_sig(c)
        if sig not in seen_concepts:
            seen_concepts.add(sig)
            concepts[c.complexity].append(c)

    seen_roles: set[tuple] = set()
    roles: dict[int, list[Role]] = {1: [], 2: []}
    for p in domain.binary_predicates:
        for r in (PrimitiveRole(p), InverseRole(PrimitiveRole(p))):
            if r.complexity > k:
                continue
            sig = role_sig(r)
            if sig not in seen_roles:
                seen_roles.add(sig)
                roles[r.complexity].append(r)

    for c in sorted([PrimitiveConcept(p) for p in domain.unary_predicates] + [TOP], key=sort_key):
        offer(c)

    for level in range(2, k + 1):
        cands: list[Concept] = []
        cands.extend(NotConcept(c) for c in concepts[level - 1])
        rest = level - 1
        for ca in range(1, rest):
            cb = rest - ca
            if ca > cb:
                break
            for i, a in enumerate(concepts[ca]):
                pool = concepts[cb][i + 1:] if ca == cb else concepts[cb]
                cands.extend(conj(a, b) for b in pool)
        for cr, rs in roles.items():
            cc = rest - cr
            if cc < 1:
                continue
            for r in rs:
                for c in concepts[cc]:
                    cands.append(ExistsConcept(r, c))
                    cands.append(ForallConcept(r, c))
        for ca, ra in roles.items():
            cb = rest - ca
            if cb not in roles or ca > cb:
                continue
            for i, a in enumerate(ra):
                pool = roles[cb][i + 1:] if ca == cb else roles[cb]
                cands.extend(role_eq(a, b) for b in pool)
        for c in sorted(set(cands), key=str):
            offer(c)

    distances: list[DistanceFeature] = []
    seen_dist: set[tuple] = set()
    dist_cands = []
    for cr, rs in roles.items():
        for r in rs:
            for ca, ca_list in concepts.items():
                for cb, cb_list in concepts.items():
                    if 1 + ca + cr + cb > k:
                        continue
                    dist_cands.extend(DistanceFeature(a, r, b) for a in ca_list for b in cb_list)
    for d in sorted(dist_cands, key=sort_key):
        sig = tuple(ix.distance(d) for ix in indices)
        if sig not in seen_dist:
            seen_dist.add(sig)
            distances.append(d)

    nodes = [c for lv in concepts.values() for c in lv] + distances
    nodes.sort(key=sort_key)
    log.debug("enumerated %d features (k=%d, %d samples)", len(nodes), k, len(samples))
    return [Feature(n, i) for i, n in enumerate(nodes)]


def denotation_signature(feature: Feature, samples: list[RelationalState], universe: ObjectUniverse) -> tuple:
    out = []
    for s in samples:
        ix = StateIndex(s, universe)
        out.append(ix.distance(feature.node) if feature.is_distance else ix.concept(feature.node))
    return tuple(out)
