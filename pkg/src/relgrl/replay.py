"""FIFO replay buffer of (abstract state, abstract action, target) triples."""

from __future__ import annotations

import zlib
from typing import NamedTuple

import numpy as np


class ReplayEntry(NamedTuple):
    state: np.ndarray
    action: np.ndarray
    target: float


class ReplayBuffer:
    """Ring buffer backed by preallocated arrays; a full buffer overwrites its oldest entry.

    The state/action widths are fixed by the first push.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._states: np.ndarray | None = None
        self._actions: np.ndarray | None = None
        self._targets = np.zeros(capacity)
        self._size = 0
        self._next = 0

    def __len__(self) -> int:
        return self._size

    def _order(self) -> np.ndarray:
        if self._size < self.capacity:
            return np.arange(self._size)
        return (np.arange(self.capacity) + self._next) % self.capacity

    @property
    def entries(self) -> list[ReplayEntry]:
        """Oldest first."""
        return [self._entry(int(i)) for i in self._order()]

    def _entry(self, i: int) -> ReplayEntry:
        return ReplayEntry(self._states[i].copy(), self._actions[i].copy(), float(self._targets[i]))

    def push(self, state: np.ndarray, action: np.ndarray, target: float) -> None:
        if self._states is None:
            self._states = np.zeros((self.capacity, len(state)))
            self._actions = np.zeros((self.capacity, len(action)))
        elif len(state) != self._states.shape[1] or len(action) != self._actions.shape[1]:
            raise ValueError("entry width does not match the buffer")
        i = self._next
        self._states[i] = state
        self._actions[i] = action
        self._targets[i] = target
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample_indices(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform indices; with replacement only while fewer than ``size`` entries are stored."""
        n = self._size
        if n == 0:
            raise ValueError("cannot sample from an empty replay buffer")
        if n < size:
            return rng.integers(n, size=size)
        return rng.choice(n, size=size, replace=False)

    def sample(self, size: int, rng: np.random.Generator) -> list[ReplayEntry]:
        return [self._entry(int(i)) for i in self.sample_indices(size, rng)]

    def sample_arrays(self, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Network inputs (state | action rows) and targets for a sampled minibatch."""
        idx = self.sample_indices(size, rng)
        x = np.concatenate([self._states[idx], self._actions[idx]], axis=1)
        return x, self._targets[idx]

    def checksum(self) -> int:
        crc = zlib.crc32(str(self._size).encode())
        if self._size:
            order = self._order()
            for arr in (self._states[order], self._actions[order], self._targets[order]):
                crc = zlib.crc32(np.ascontiguousarray(arr).tobytes(), crc)
        return crc

    def clear(self) -> None:
        self._size = 0
        self._next = 0


def buffer_push(buffer: ReplayBuffer, state, action, target) -> None:
    buffer.push(state, action, target)


def sample_minibatch(buffer: ReplayBuffer, size: int, rng: np.random.Generator) -> list[ReplayEntry]:
    return buffer.sample(size, rng)
