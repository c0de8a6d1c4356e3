"""
Multi-index arithmetic
======================
A multi-index p = (p_1, ..., p_n) counts derivatives per base direction.
Directions are numbered 1..n as in the coordinate notation x^1, ..., x^n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator

from jetvar.errors import DimensionError, JetIndexError


@total_ordering
@dataclass(frozen=True)
class MultiIndex:
    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if any(e < 0 for e in entries):
            raise JetIndexError(f"multi-index entries must be nonnegative, got {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zero(cls, n: int) -> MultiIndex:
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, direction: int) -> MultiIndex:
        return cls.zero(n).add_direction(direction)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def degree(self) -> int:
        return sum(self.entries)

    def is_zero(self) -> bool:
        return self.degree == 0

    @property
    def sort_key(self) -> tuple:
        # graded, then (1,0) before (0,1)
        return (self.degree, tuple(-e for e in self.entries))

    def __lt__(self, other: MultiIndex) -> bool:
        return self.sort_key < other.sort_key

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, direction: int) -> int:
        self._check_direction(direction)
        return self.entries[direction - 1]

    def _check_direction(self, direction: int) -> None:
        if not 1 <= direction <= self.n:
            raise JetIndexError(f"direction {direction} out of range 1..{self.n}")

    def add_direction(self, direction: int) -> MultiIndex:
        self._check_direction(direction)
        entries = list(self.entries)
        entries[direction - 1] += 1
        return MultiIndex(tuple(entries))

    def remove_direction(self, direction: int) -> MultiIndex:
        self._check_direction(direction)
        if self.entries[direction - 1] == 0:
            raise JetIndexError(f"direction {direction} does not occur in {self.entries}")
        entries = list(self.entries)
        entries[direction - 1] -= 1
        return MultiIndex(tuple(entries))

    def __add__(self, other: MultiIndex) -> MultiIndex:
        _check_same_length(self, other)
        return MultiIndex(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: MultiIndex) -> MultiIndex:
        _check_same_length(self, other)
        return MultiIndex(tuple(a - b for a, b in zip(self.entries, other.entries)))

    def directions(self) -> list[int]:
        """Directions with multiplicity, lowest first: (2,1) -> [1, 1, 2]."""
        return [d for d, e in enumerate(self.entries, start=1) for _ in range(e)]

    def largest_direction(self) -> int:
        return max(d for d, e in enumerate(self.entries, start=1) if e > 0)

    def __repr__(self) -> str:
        return f"MultiIndex{self.entries}"


def _check_same_length(p: MultiIndex, q: MultiIndex) -> None:
    if p.n != q.n:
        raise DimensionError(f"multi-index lengths differ: {p.n} and {q.n}")


def add_direction(p: MultiIndex, direction: int) -> MultiIndex:
    return p.add_direction(direction)


def factorial(p: MultiIndex) -> int:
    return math.prod(math.factorial(e) for e in p.entries)


def multinomial(p: MultiIndex, q: MultiIndex) -> int:
    """(p+q)! / (p! q!), computed entrywise as a product of binomials."""
    _check_same_length(p, q)
    return math.prod(math.comb(a + b, a) for a, b in zip(p.entries, q.entries))


def enumerate_upto(n: int, k: int) -> list[MultiIndex]:
    """All length-n multi-indices of degree <= k in graded-lexicographic order."""
    found = [
        MultiIndex(entries)
        for entries in itertools.product(range(k + 1), repeat=n)
        if sum(entries) <= k
    ]
    return sorted(found)


def splittings(p: MultiIndex) -> list[tuple[MultiIndex, MultiIndex]]:
    """Ordered pairs (q, t) with q + t = p."""
    pairs = []
    for q_entries in itertools.product(*(range(e + 1) for e in p.entries)):
        q = MultiIndex(q_entries)
        pairs.append((q, p - q))
    return pairs
