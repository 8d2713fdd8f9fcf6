"""Abstract state and action vectors over a fixed feature set.

For features ``F``, action names ``A`` (alphabetical) and ``N`` the largest
action arity, a (state, action) pair becomes a vector of length
``|F| + |A| + N*|F|``:

* the abstract state: the value of every feature in the state,
* a one-hot block for the action name,
* for every parameter slot, the membership bit of the argument in each
  feature's denotation (distance features always contribute 0). Slots beyond
  the action's arity are zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from relgrl.features.evaluate import StateIndex
from relgrl.features.grammar import DistanceFeature, Feature, load_features, dump_features
from relgrl.relational import Domain, GroundAction, ObjectUniverse, RelationalState, canonical_state_key


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class EncodingLayout:
    features: tuple[Feature, ...]
    action_names: tuple[str, ...]
    max_params: int

    @classmethod
    def for_domain(cls, domain: Domain, features) -> "EncodingLayout":
        return cls(tuple(features), tuple(domain.action_names), domain.max_action_arity)

    def __post_init__(self):
        if list(self.action_names) != sorted(self.action_names):
            raise LayoutError("action names must be in alphabetical order")
        if self.max_params < 0:
            raise LayoutError("max_params must be non-negative")

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def state_dim(self) -> int:
        return len(self.features)

    @property
    def action_dim(self) -> int:
        return len(self.action_names) + self.max_params * len(self.features)

    @property
    def input_dim(self) -> int:
        return self.state_dim + self.action_dim

    def action_index(self, name: str) -> int:
        try:
            return self.action_names.index(name)
        except ValueError:
            raise LayoutError(f"action {name!r} is not part of the layout") from None

    def to_text(self) -> str:
        return (f"actions: {' '.join(self.action_names)}\n"
                f"max_params: {self.max_params}\n"
                f"features: {len(self.features)}\n" + dump_features(list(self.features)))

    @classmethod
    def from_text(cls, text: str) -> "EncodingLayout":
        lines = text.split("\n", 3)
        if len(lines) < 3 or not lines[0].startswith("actions:") or not lines[1].startswith("max_params:") \
                or not lines[2].startswith("features:"):
            raise LayoutError("malformed layout header")
        actions = tuple(lines[0].split(":", 1)[1].split())
        max_params = int(lines[1].split(":", 1)[1])
        n = int(lines[2].split(":", 1)[1])
        feats = load_features(lines[3] if len(lines) > 3 else "")
        if len(feats) != n:
            raise LayoutError(f"layout announces {n} features but lists {len(feats)}")
        return cls(tuple(feats), actions, max_params)

    def check_domain(self, domain: Domain) -> None:
        if tuple(domain.action_names) != self.action_names or domain.max_action_arity != self.max_params:
            raise LayoutError(f"layout actions {self.action_names} do not match domain {domain.name!r}")


class StateEncoding:
    """Feature values and per-object membership bits of one state."""

    __slots__ = ("values", "membership", "pos")

    def __init__(self, values: np.ndarray, membership: np.ndarray, pos: dict[str, int]):
        self.values = values
        self.membership = membership
        self.pos = pos


def _encode(layout: EncodingLayout, state: RelationalState, universe: ObjectUniverse) -> StateEncoding:
    ix = StateIndex(state, universe)
    nf = layout.n_features
    values = np.zeros(nf, dtype=np.float64)
    membership = np.zeros((len(universe), nf), dtype=np.float64)
    for j, f in enumerate(layout.features):
        node = f.node
        if isinstance(node, DistanceFeature):
            values[j] = ix.distance(node)
            continue
        mask = ix.concept(node)
        values[j] = mask.bit_count()
        i = 0
        while mask:
            if mask & 1:
                membership[i, j] = 1.0
            mask >>= 1
            i += 1
    return StateEncoding(values, membership, ix.pos)


def encode_state(layout: EncodingLayout, state: RelationalState, universe: ObjectUniverse) -> np.ndarray:
    return _encode(layout, state, universe).values.astype(np.int64)


def _action_vector(layout: EncodingLayout, enc: StateEncoding, action: GroundAction) -> np.ndarray:
    out = np.zeros(layout.action_dim, dtype=np.float64)
    out[layout.action_index(action.schema)] = 1.0
    if len(action.args) > layout.max_params:
        raise LayoutError(f"action {action} has more parameters than the layout allows")
    base = len(layout.action_names)
    nf = layout.n_features
    for slot, obj in enumerate(action.args):
        try:
            row = enc.pos[obj]
        except KeyError:
            raise LayoutError(f"object {obj!r} is not in the universe") from None
        out[base + slot * nf: base + (slot + 1) * nf] = enc.membership[row]
    return out


def encode_action(layout: EncodingLayout, action: GroundAction, state: RelationalState,
                  universe: ObjectUniverse) -> np.ndarray:
    return _action_vector(layout, _encode(layout, state, universe), action).astype(np.int64)


class Encoder:
    """Caches state encodings of one instance and builds network inputs.

    With ``normalize=True`` feature values are divided by the running maximum
    seen per feature (at least 1); the default feeds raw counts.
    """

    def __init__(self, layout: EncodingLayout, universe: ObjectUniverse, normalize: bool = False,
                 cache_size: int | None = None):
        self.layout = layout
        self.universe = universe
        self.normalize = normalize
        self._running_max = np.ones(layout.n_features)
        self._cache: dict[str, StateEncoding] = {}
        self._cache_size = cache_size

    def state_encoding(self, state: RelationalState, key: str | None = None) -> StateEncoding:
        key = key if key is not None else canonical_state_key(state)
        enc = self._cache.get(key)
        if enc is None:
            enc = _encode(self.layout, state, self.universe)
            if self._cache_size is not None and len(self._cache) >= self._cache_size:
                self._cache.clear()
            self._cache[key] = enc
        return enc

    def state_vector(self, enc: StateEncoding) -> np.ndarray:
        if not self.normalize:
            return enc.values
        np.maximum(self._running_max, enc.values, out=self._running_max)
        return enc.values / self._running_max

    def inputs(self, state: RelationalState, actions: list[GroundAction], key: str | None = None) -> np.ndarray:
        """Row ``i`` is the concatenated (state, action ``i``) network input."""
        enc = self.state_encoding(state, key)
        sv = self.state_vector(enc)
        out = np.empty((len(actions), self.layout.input_dim))
        out[:, : self.layout.state_dim] = sv
        for i, a in enumerate(actions):
            out[i, self.layout.state_dim:] = _action_vector(self.layout, enc, a)
        return out
