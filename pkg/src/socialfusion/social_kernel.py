"""Social-information state spaces and their transition kernels.

Step ``n`` (1-based) has the state ``G_n`` built from the broadcasts
``X_1 .. X_{n-1}``. Every kernel enumerates its reachable states at a step and
numbers them ``0 .. num_states(n) - 1``; the propagation engine and the Monte
Carlo simulator work on those integer indices, the tuple form is for callers.

Bit histories are encoded most-recent-last; as integers the most recent bit is
the least significant one.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Iterator

import numpy as np

SocialState = tuple


class UnreachableStateError(ValueError):
    pass


class SocialKernel(ABC):
    """Transition structure ``beta(g' | x, g)`` between consecutive steps.

    Subclasses implement the indexing methods and either
    :meth:`next_index` (deterministic kernels) or :meth:`successors`.
    """

    initial_state: SocialState = ()
    deterministic = True

    @abstractmethod
    def num_states(self, n: int) -> int:
        ...

    @abstractmethod
    def state_at(self, n: int, index: int) -> SocialState:
        ...

    @abstractmethod
    def index_of(self, n: int, g: SocialState) -> int:
        """Index of ``g`` at step ``n``; raises :class:`UnreachableStateError`."""

    def next_index(self, n: int, index: np.ndarray, x) -> np.ndarray:
        """Vectorised successor index for deterministic kernels."""
        raise NotImplementedError(f"{type(self).__name__} is not deterministic")

    def successors(self, n: int, g: SocialState, x: int) -> list[tuple[SocialState, float]]:
        i = self.index_of(n, g)
        _check_bit(x)
        j = int(self.next_index(n, np.array([i]), x)[0])
        return [(self.state_at(n + 1, j), 1.0)]

    def states_at(self, n: int) -> Iterator[SocialState]:
        _check_step(n)
        return (self.state_at(n, i) for i in range(self.num_states(n)))

    def transitions(self, n: int, w: int):
        """All transitions out of step ``n`` under hypothesis ``w``.

        Returns arrays ``(src, x, dst, prob)``. Built-in kernels ignore ``w``;
        the argument is there for observation models that depend on it.
        """
        src = np.arange(self.num_states(n))
        if self.deterministic:
            parts = [(src, np.full_like(src, x), self.next_index(n, src, x)) for x in (0, 1)]
            s, x, d = (np.concatenate(a) for a in zip(*parts))
            return s, x, d, np.ones(s.size)
        rows = []
        for i in src:
            g = self.state_at(n, int(i))
            for x in (0, 1):
                for g_next, p in self.successors(n, g, x):
                    if p > 0:
                        rows.append((i, x, self.index_of(n + 1, g_next), p))
        s, x, d, p = (np.array(c) for c in zip(*rows))
        return s.astype(int), x.astype(int), d.astype(int), p.astype(float)

    def describe(self) -> str:
        return type(self).__name__


class WindowKernel(SocialKernel):
    """Node ``n`` hears the last ``min(n - 1, k)`` broadcasts."""

    def __init__(self, k: int):
        if int(k) != k or k < 1:
            raise ValueError(f"window length must be a positive integer, got {k!r}")
        self.k = int(k)

    def _length(self, n: int) -> int:
        return min(_check_step(n) - 1, self.k)

    def num_states(self, n):
        return 1 << self._length(n)

    def state_at(self, n, index):
        return _bits(index, self._length(n))

    def index_of(self, n, g):
        length = self._length(n)
        if len(g) != length or any(b not in (0, 1) for b in g):
            raise UnreachableStateError(f"{g!r} is not a window state at step {n} (k={self.k})")
        return _as_int(g)

    def next_index(self, n, index, x):
        mask = (1 << self._length(n + 1)) - 1
        return ((np.asarray(index) << 1) | x) & mask

    def describe(self):
        return f"window(k={self.k})"

    def __repr__(self):
        return f"WindowKernel(k={self.k})"


class CountKernel(SocialKernel):
    """Node ``n`` knows how many of the previous ``n - 1`` broadcasts were 1.

    State ``(n - 1, ones)``; index ``ones``.
    """

    def num_states(self, n):
        return _check_step(n)

    def state_at(self, n, index):
        return (n - 1, int(index))

    def index_of(self, n, g):
        _check_step(n)
        if len(g) != 2 or g[0] != n - 1 or not 0 <= g[1] <= n - 1:
            raise UnreachableStateError(f"{g!r} is not a count state at step {n}")
        return int(g[1])

    @property
    def initial_state(self):
        return (0, 0)

    def next_index(self, n, index, x):
        return np.asarray(index) + x

    def describe(self):
        return "count"

    def __repr__(self):
        return "CountKernel()"


class FullHistoryKernel(SocialKernel):
    """Node ``n`` hears every previous broadcast."""

    def num_states(self, n):
        return 1 << (_check_step(n) - 1)

    def state_at(self, n, index):
        return _bits(index, n - 1)

    def index_of(self, n, g):
        _check_step(n)
        if len(g) != n - 1 or any(b not in (0, 1) for b in g):
            raise UnreachableStateError(f"{g!r} is not a history of length {n - 1}")
        return _as_int(g)

    def next_index(self, n, index, x):
        return (np.asarray(index) << 1) | x

    def describe(self):
        return "full_history"

    def __repr__(self):
        return "FullHistoryKernel()"


def make_kernel(kind: str, k: int | None = None) -> SocialKernel:
    if kind == "window":
        if k is None:
            raise ValueError("window kernel needs k")
        return WindowKernel(k)
    if kind == "count":
        return CountKernel()
    if kind == "full_history":
        return FullHistoryKernel()
    raise ValueError(f"unknown kernel kind {kind!r}")


def successors(kernel: SocialKernel, n: int, g: SocialState, x: int):
    return kernel.successors(n, g, x)


def states_at(kernel: SocialKernel, n: int) -> list[SocialState]:
    return list(kernel.states_at(n))


def _bits(index: int, length: int) -> SocialState:
    index = int(index)
    return tuple((index >> (length - 1 - i)) & 1 for i in range(length))


def _as_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def _check_step(n) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"step index must be a positive integer, got {n!r}")
    return int(n)


def _check_bit(x):
    if x not in (0, 1):
        raise ValueError(f"broadcast must be 0 or 1, got {x!r}")
