"""AST of the description-logic feature language.

Concepts::

    C -> p1 | Top | Not(C) | And(C, C) | Forall(R, C) | Exists(R, C) | Equal(R, R)

Roles::

    R -> p2 | Inverse(R)

plus ``Distance(C, R, C)`` features. Nodes are frozen dataclasses; their
``str`` is the canonical serialized form used for identity and ordering.
Build compound nodes through :func:`inverse`, :func:`conj` and
:func:`role_eq` so that equivalent trees get the same serialization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class PrimitiveRole:
    name: str

    def __str__(self):
        return self.name

    @property
    def complexity(self) -> int:
        return 1


@dataclass(frozen=True)
class InverseRole:
    role: PrimitiveRole

    def __str__(self):
        return f"Inverse({self.role})"

    @property
    def complexity(self) -> int:
        return 1 + self.role.complexity


Role = Union[PrimitiveRole, InverseRole]


@dataclass(frozen=True)
class PrimitiveConcept:
    name: str

    def __str__(self):
        return self.name

    @property
    def complexity(self) -> int:
        return 1


@dataclass(frozen=True)
class TopConcept:
    def __str__(self):
        return "Top"

    @property
    def complexity(self) -> int:
        return 1


@dataclass(frozen=True)
class NotConcept:
    concept: "Concept"

    def __str__(self):
        return f"Not({self.concept})"

    @property
    def complexity(self) -> int:
        return 1 + self.concept.complexity


@dataclass(frozen=True)
class AndConcept:
    left: "Concept"
    right: "Concept"

    def __str__(self):
        return f"And({self.left},{self.right})"

    @property
    def complexity(self) -> int:
        return 1 + self.left.complexity + self.right.complexity


@dataclass(frozen=True)
class ForallConcept:
    role: Role
    concept: "Concept"

    def __str__(self):
        return f"Forall({self.role},{self.concept})"

    @property
    def complexity(self) -> int:
        return 1 + self.role.complexity + self.concept.complexity


@dataclass(frozen=True)
class ExistsConcept:
    role: Role
    concept: "Concept"

    def __str__(self):
        return f"Exists({self.role},{self.concept})"

    @property
    def complexity(self) -> int:
        return 1 + self.role.complexity + self.concept.complexity


@dataclass(frozen=True)
class RoleEqConcept:
    left: Role
    right: Role

    def __str__(self):
        return f"Equal({self.left},{self.right})"

    @property
    def complexity(self) -> int:
        return 1 + self.left.complexity + self.right.complexity


Concept = Union[PrimitiveConcept, TopConcept, NotConcept, AndConcept, ForallConcept, ExistsConcept, RoleEqConcept]


@dataclass(frozen=True)
class DistanceFeature:
    source: Concept
    role: Role
    target: Concept

    def __str__(self):
        return f"Distance({self.source},{self.role},{self.target})"

    @property
    def complexity(self) -> int:
        return 1 + self.source.complexity + self.role.complexity + self.target.complexity


Node = Union[Concept, DistanceFeature]

TOP = TopConcept()


def inverse(role: Role) -> Role:
    if isinstance(role, InverseRole):
        return role.role
    return InverseRole(role)


def conj(a: Concept, b: Concept) -> AndConcept:
    return AndConcept(a, b) if str(a) <= str(b) else AndConcept(b, a)


def role_eq(a: Role, b: Role) -> RoleEqConcept:
    return RoleEqConcept(a, b) if str(a) <= str(b) else RoleEqConcept(b, a)


@dataclass(frozen=True)
class Feature:
    """A node of the feature language with its position in a feature set."""

    node: Node
    id: int = -1

    @property
    def complexity(self) -> int:
        return self.node.complexity

    @property
    def is_distance(self) -> bool:
        return isinstance(self.node, DistanceFeature)

    def __str__(self):
        return str(self.node)


def sort_key(node: Node) -> tuple[int, str]:
    return node.complexity, str(node)


class FeatureSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_\-]*|[(),])")


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise FeatureSyntaxError(f"unexpected character at {pos} in {text!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.i = 0
        self.text = text

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise FeatureSyntaxError(f"expected {expected or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def done(self):
        if self.i != len(self.tokens):
            raise FeatureSyntaxError(f"trailing input in {self.text!r}")

    def role(self) -> Role:
        name = self.take()
        if name == "Inverse":
            self.take("(")
            inner = self.role()
            self.take(")")
            return inverse(inner)
        if name in "(),":
            raise FeatureSyntaxError(f"expected a role in {self.text!r}")
        return PrimitiveRole(name)

    def concept(self) -> Concept:
        name = self.take()
        if name == "Top":
            return TOP
        if name in ("Not",):
            self.take("(")
            c = self.concept()
            self.take(")")
            return NotConcept(c)
        if name == "And":
            self.take("(")
            a = self.concept()
            self.take(",")
            b = self.concept()
            self.take(")")
            return conj(a, b)
        if name in ("Forall", "Exists"):
            self.take("(")
            r = self.role()
            self.take(",")
            c = self.concept()
            self.take(")")
            return ForallConcept(r, c) if name == "Forall" else ExistsConcept(r, c)
        if name == "Equal":
            self.take("(")
            a = self.role()
            self.take(",")
            b = self.role()
            self.take(")")
            return role_eq(a, b)
        if name in "(),":
            raise FeatureSyntaxError(f"expected a concept in {self.text!r}")
        return PrimitiveConcept(name)

    def node(self) -> Node:
        if self.peek() == "Distance":
            self.take()
            self.take("(")
            a = self.concept()
            self.take(",")
            r = self.role()
            self.take(",")
            b = self.concept()
            self.take(")")
            return DistanceFeature(a, r, b)
        return self.concept()


def parse_node(text: str) -> Node:
    p = _Parser(text)
    node = p.node()
    p.done()
    return node


def parse_concept(text: str) -> Concept:
    p = _Parser(text)
    c = p.concept()
    p.done()
    return c


def parse_role(text: str) -> Role:
    p = _Parser(text)
    r = p.role()
    p.done()
    return r


def dump_features(features: list[Feature]) -> str:
    """One ``<complexity>\\t<serialized node>`` line per feature, in id order."""
    return "".join(f"{f.complexity}\t{f.node}\n" for f in features)


def load_features(text: str) -> list[Feature]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            comp, ser = line.split("\t", 1)
            node = parse_node(ser.strip())
        except ValueError as e:
            raise FeatureSyntaxError(f"line {lineno}: {e}") from None
        if int(comp) != node.complexity:
            raise FeatureSyntaxError(f"line {lineno}: complexity {comp} does not match {node.complexity}")
        out.append(Feature(node, len(out)))
    return out
