"""Reader and writer for the line-oriented instance file format.

Example::

    # Sysadmin on the complete graph K2
    domain: sysadmin
    objects: c0 c1
    static:
        link(c0,c1) link(c1,c0)
    init: running(c0) running(c1)
    horizon: 40
    seed: 0
    params: reboot_cost=0.75

A section header starts in column 1 and is followed by ``:``. Its content is
the rest of the header line plus every following indented line. ``#`` starts
a comment that runs to the end of the line. Sections:

``domain``   name of a registered domain (required)
``objects``  whitespace separated object names (required, non-empty)
``static``   facts over static predicates (topology, prerequisites, ...)
``init``     facts over the remaining predicates; when the section is absent
             the domain's default initial facts are used
``horizon``  positive integer, default 40
``seed``     non-negative integer, default 0
``params``   ``key=value`` overrides of the domain's constants

Facts are written ``pred(a,b)``, ``pred(a)`` or ``pred()``; whitespace around
parentheses and commas is ignored. Every error names its line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path

from relgrl.envs.base import DEFAULT_HORIZON, InstanceSpec, get_simulator
from relgrl.relational import GroundFact, ObjectUniverse

SECTIONS = ("domain", "objects", "static", "init", "horizon", "seed", "params")

_HEADER = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*:")
_NAME = r"[A-Za-z_][A-Za-z0-9_\-]*"
_FACT = re.compile(rf"({_NAME})\s*(?:\(([^()]*)\))?")
_PARAM = re.compile(rf"({_NAME})\s*=\s*(\S+)")


class InstanceParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Chunk:
    text: str
    line: int
    column: int  # 1-based column of text[0]


def _strip_comment(raw: str) -> str:
    i = raw.find("#")
    return raw if i < 0 else raw[:i]


def _split_sections(text: str) -> dict[str, tuple[int, list[_Chunk]]]:
    sections: dict[str, tuple[int, list[_Chunk]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        if body[0].isspace():
            if current is None:
                col = len(body) - len(body.lstrip()) + 1
                raise InstanceParseError("content outside of any section", lineno, col)
            sections[current][1].append(_Chunk(body, lineno, 1))
            continue
        m = _HEADER.match(body)
        if not m:
            raise InstanceParseError("expected a section header 'name:'", lineno, 1)
        name = m.group(1)
        if name not in SECTIONS:
            raise InstanceParseError(f"unknown section {name!r}", lineno, 1)
        if name in sections:
            raise InstanceParseError(f"duplicate section {name!r}", lineno, 1)
        sections[name] = (lineno, [_Chunk(body[m.end():], lineno, m.end() + 1)])
        current = name
    return sections


def _tokens(chunks: list[_Chunk]):
    for ch in chunks:
        for m in re.finditer(r"\S+", ch.text):
            yield m.group(0), ch.line, ch.column + m.start()


def _facts(chunks: list[_Chunk]):
    for ch in chunks:
        pos = 0
        text = ch.text
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _FACT.match(text, pos)
            if not m or m.end() == pos:
                raise InstanceParseError(f"malformed fact near {text[pos:pos + 12]!r}", ch.line, ch.column + pos)
            if m.group(2) is None and m.end() < len(text) and text[m.end()] == "(":
                raise InstanceParseError("unbalanced parentheses", ch.line, ch.column + m.end())
            raw_args = m.group(2)
            args: tuple[str, ...] = ()
            if raw_args is not None and raw_args.strip():
                args = tuple(a.strip() for a in raw_args.split(","))
                if any(not re.fullmatch(_NAME, a) for a in args):
                    raise InstanceParseError(f"malformed argument list {raw_args!r}", ch.line, ch.column + pos)
            yield m.group(1), args, ch.line, ch.column + pos
            pos = m.end()


def parse_instance(text: str) -> InstanceSpec:
    sections = _split_sections(text)
    if "domain" not in sections:
        raise InstanceParseError("missing 'domain:' section", 1, 1)
    dom_line, dom_chunks = sections["domain"]
    toks = list(_tokens(dom_chunks))
    if len(toks) != 1:
        raise InstanceParseError("'domain:' expects exactly one name", dom_line, 1)
    dname, dl, dc = toks[0]
    try:
        sim = get_simulator(dname)
    except ValueError as e:
        raise InstanceParseError(str(e), dl, dc) from None
    domain = sim.domain

    if "objects" not in sections:
        raise InstanceParseError("missing 'objects:' section", dom_line, 1)
    obj_line, obj_chunks = sections["objects"]
    objects: list[str] = []
    for tok, ln, col in _tokens(obj_chunks):
        if not re.fullmatch(_NAME, tok):
            raise InstanceParseError(f"invalid object name {tok!r}", ln, col)
        if tok in objects:
            raise InstanceParseError(f"object {tok!r} declared twice", ln, col)
        objects.append(tok)
    if not objects:
        raise InstanceParseError("universe must be non-empty", obj_line, 1)
    universe = ObjectUniverse(tuple(objects))

    def read_facts(section: str, static: bool) -> set[GroundFact]:
        out: set[GroundFact] = set()
        for pred, args, ln, col in _facts(sections[section][1]):
            try:
                arity = domain.predicate_arity(pred)
            except KeyError:
                raise InstanceParseError(f"unknown predicate {pred!r}", ln, col) from None
            if len(args) != arity:
                raise InstanceParseError(
                    f"arity mismatch: {pred!r} expects {arity} argument(s), got {len(args)}", ln, col)
            for a in args:
                if a not in universe:
                    raise InstanceParseError(f"object {a!r} is not declared", ln, col)
            if (pred in sim.static_predicates) != static:
                kind = "static" if static else "init"
                raise InstanceParseError(f"predicate {pred!r} does not belong in '{kind}:'", ln, col)
            out.add(GroundFact(pred, args))
        return out

    static_facts = read_facts("static", True) if "static" in sections else set()
    if "init" in sections:
        init_facts = read_facts("init", False)
    else:
        init_facts = set(sim.default_initial_facts(universe))

    def read_int(section: str, default: int, minimum: int) -> int:
        if section not in sections:
            return default
        line, chunks = sections[section]
        toks = list(_tokens(chunks))
        if len(toks) != 1:
            raise InstanceParseError(f"'{section}:' expects one integer", line, 1)
        tok, ln, col = toks[0]
        try:
            val = int(tok)
        except ValueError:
            raise InstanceParseError(f"'{section}:' expects an integer, got {tok!r}", ln, col) from None
        if val < minimum:
            raise InstanceParseError(f"'{section}:' must be >= {minimum}", ln, col)
        return val

    horizon = read_int("horizon", DEFAULT_HORIZON, 1)
    seed = read_int("seed", 0, 0)

    params: dict[str, float] = {}
    if "params" in sections:
        for tok, ln, col in _tokens(sections["params"][1]):
            m = _PARAM.fullmatch(tok)
            if not m:
                raise InstanceParseError(f"expected key=value, got {tok!r}", ln, col)
            key, raw = m.groups()
            if key not in sim.default_params:
                raise InstanceParseError(f"unknown parameter {key!r} for domain {dname!r}", ln, col)
            try:
                params[key] = float(raw)
            except ValueError:
                raise InstanceParseError(f"parameter {key!r} is not a number: {raw!r}", ln, col) from None

    return InstanceSpec(domain, universe, frozenset(init_facts), frozenset(static_facts), horizon, seed,
                        tuple(sorted(params.items())))


def _fmt_facts(facts) -> str:
    return "\n".join(f"    {f}" for f in sorted(facts))


def format_instance(spec: InstanceSpec) -> str:
    lines = []
    if spec.name:
        lines.append(f"# {spec.name}")
    lines.append(f"domain: {spec.domain.name}")
    lines.append("objects: " + " ".join(spec.universe.objects))
    lines.append("static:")
    if spec.static_facts:
        lines.append(_fmt_facts(spec.static_facts))
    lines.append("init:")
    if spec.initial_facts:
        lines.append(_fmt_facts(spec.initial_facts))
    lines.append(f"horizon: {spec.horizon}")
    lines.append(f"seed: {spec.seed}")
    if spec.params:
        lines.append("params: " + " ".join(f"{k}={v!r}" for k, v in spec.params))
    return "\n".join(lines) + "\n"


def load_instance(path) -> InstanceSpec:
    with open(path, encoding="utf-8") as fh:
        spec = parse_instance(fh.read())
    return replace(spec, name=Path(path).stem)
