"""Relational MDP primitives: domains, objects, ground facts, states and actions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

NOP = "nop"
EMPTY_STATE_KEY = "<empty>"


@dataclass(frozen=True)
class Domain:
    """Predicates (arity <= 2) and parameterized action schemas of a problem domain.

    ``action_schemas`` is kept sorted by name so that one-hot indices are fixed.
    A ``nop`` schema is added when the caller does not provide one and
    ``nop_injected`` records that it happened.
    """

    name: str
    predicates: tuple[tuple[str, int], ...]
    action_schemas: tuple[tuple[str, int], ...]
    nop_injected: bool = False

    @classmethod
    def create(
        cls,
        name: str,
        predicates: Iterable[tuple[str, int]],
        action_schemas: Iterable[tuple[str, int]],
    ) -> "Domain":
        preds = tuple(predicates)
        schemas = list(action_schemas)
        injected = NOP not in {n for n, _ in schemas}
        if injected:
            schemas.append((NOP, 0))
        return cls(name, preds, tuple(sorted(schemas)), injected)

    def __post_init__(self):
        names = [p for p, _ in self.predicates]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate predicate names in domain {self.name!r}")
        for p, arity in self.predicates:
            if arity not in (0, 1, 2):
                raise ValueError(f"predicate {p!r} has arity {arity}; only 0, 1, 2 are supported")
        anames = [a for a, _ in self.action_schemas]
        if len(set(anames)) != len(anames):
            raise ValueError(f"duplicate action schema names in domain {self.name!r}")
        if anames != sorted(anames):
            raise ValueError("action schemas must be sorted alphabetically")
        for a, arity in self.action_schemas:
            if arity < 0:
                raise ValueError(f"action {a!r} has negative arity")

    def predicate_arity(self, name: str) -> int:
        for p, arity in self.predicates:
            if p == name:
                return arity
        raise KeyError(name)

    def action_arity(self, name: str) -> int:
        for a, arity in self.action_schemas:
            if a == name:
                return arity
        raise KeyError(name)

    @property
    def unary_predicates(self) -> list[str]:
        return sorted(p for p, a in self.predicates if a == 1)

    @property
    def binary_predicates(self) -> list[str]:
        return sorted(p for p, a in self.predicates if a == 2)

    @property
    def action_names(self) -> list[str]:
        return [a for a, _ in self.action_schemas]

    @property
    def max_action_arity(self) -> int:
        return max((a for _, a in self.action_schemas), default=0)


@dataclass(frozen=True)
class ObjectUniverse:
    objects: tuple[str, ...]

    def __post_init__(self):
        if not self.objects:
            raise ValueError("universe must be non-empty")
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("object names must be distinct")

    def __len__(self) -> int:
        return len(self.objects)

    def __iter__(self):
        return iter(self.objects)

    def __contains__(self, name: object) -> bool:
        return name in self._members

    @property
    def _members(self) -> frozenset[str]:
        # cached lazily on the frozen instance
        try:
            return self.__dict__["_member_set"]
        except KeyError:
            s = frozenset(self.objects)
            object.__setattr__(self, "_member_set", s)
            return s

    def index(self, name: str) -> int:
        return self.objects.index(name)


@dataclass(frozen=True, order=True)
class GroundFact:
    predicate: str
    args: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_text", f"{self.predicate}({','.join(self.args)})")

    def __str__(self) -> str:
        return self._text

    def validate(self, domain: Domain, universe: ObjectUniverse) -> None:
        try:
            arity = domain.predicate_arity(self.predicate)
        except KeyError:
            raise ValueError(f"unknown predicate {self.predicate!r}") from None
        if len(self.args) != arity:
            raise ValueError(
                f"predicate {self.predicate!r} expects {arity} argument(s), got {len(self.args)}"
            )
        for o in self.args:
            if o not in universe:
                raise ValueError(f"object {o!r} is not declared")


@dataclass(frozen=True, order=True)
class GroundAction:
    schema: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.schema}({','.join(self.args)})"

    def validate(self, domain: Domain, universe: ObjectUniverse) -> None:
        try:
            arity = domain.action_arity(self.schema)
        except KeyError:
            raise ValueError(f"unknown action {self.schema!r}") from None
        if len(self.args) != arity:
            raise ValueError(f"action {self.schema!r} expects {arity} argument(s), got {len(self.args)}")
        for o in self.args:
            if o not in universe:
                raise ValueError(f"object {o!r} is not declared")


@dataclass(frozen=True)
class RelationalState:
    """An immutable set of true ground facts."""

    facts: frozenset[GroundFact] = field(default_factory=frozenset)

    @classmethod
    def of(cls, facts: Iterable[GroundFact]) -> "RelationalState":
        return cls(frozenset(facts))

    def __contains__(self, fact: object) -> bool:
        return fact in self.facts

    def __iter__(self):
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def key(self) -> str:
        return canonical_state_key(self)

    def with_predicate(self, predicate: str) -> list[GroundFact]:
        return [f for f in self.facts if f.predicate == predicate]


def state_contains(state: RelationalState, fact: GroundFact) -> bool:
    return fact in state.facts


def canonical_state_key(state: RelationalState) -> str:
    """Order-independent string key; facts are sorted lexicographically."""
    if not state.facts:
        return EMPTY_STATE_KEY
    return " ".join(sorted([f._text for f in state.facts]))


def ground_actions(domain: Domain, universe: ObjectUniverse) -> list[GroundAction]:
    """All instantiations: alphabetical by schema, then lexicographic over argument tuples."""
    names = sorted(universe.objects)
    out = []
    for schema, arity in domain.action_schemas:
        for args in itertools.product(names, repeat=arity):
            out.append(GroundAction(schema, args))
    return out


def rename_state(state: RelationalState, mapping: dict[str, str]) -> RelationalState:
    return RelationalState(
        frozenset(GroundFact(f.predicate, tuple(mapping[o] for o in f.args)) for f in state.facts)
    )


def rename_action(action: GroundAction, mapping: dict[str, str]) -> GroundAction:
    return GroundAction(action.schema, tuple(mapping[o] for o in action.args))


def fact(predicate: str, *args: str) -> GroundFact:
    return GroundFact(predicate, tuple(args))


def action(schema: str, *args: str) -> GroundAction:
    return GroundAction(schema, tuple(args))


def validate_facts(facts: Sequence[GroundFact], domain: Domain, universe: ObjectUniverse) -> None:
    for f in facts:
        f.validate(domain, universe)
