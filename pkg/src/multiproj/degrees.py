"""Multi-indices in N^k and the descendant order.

A multi-index is a plain tuple of nonnegative ints.  Factor indices are
0-based throughout the package: ``unit(k, 0)`` is the first unit vector.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

MultiIndex = tuple[int, ...]


def multi_index(entries: Iterable[int]) -> MultiIndex:
    a = tuple(int(x) for x in entries)
    if not a:
        raise ValueError("a multi-index needs at least one entry")
    if any(x < 0 for x in a):
        raise ValueError(f"negative entry in multi-index {a}")
    return a


def unit(k: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(k))


def add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def shift(a: MultiIndex, i: int, t: int = 1) -> tuple[int, ...]:
    """a + t*e_i; may produce negative entries when t < 0."""
    return a[:i] + (a[i] + t,) + a[i + 1:]


def immediate_descendants(a: MultiIndex) -> list[MultiIndex]:
    return [shift(a, i) for i in range(len(a))]


def parents(a: MultiIndex) -> list[MultiIndex]:
    return [shift(a, i, -1) for i in range(len(a)) if a[i] > 0]


def _same_length(a, b):
    if len(a) != len(b):
        raise ValueError(f"multi-indices of different lengths: {a}, {b}")


def is_descendant(b: MultiIndex, a: MultiIndex) -> bool:
    """True iff b >= a componentwise and b != a."""
    _same_length(a, b)
    return all(x >= y for x, y in zip(b, a)) and b != a


def is_ancestor(c: MultiIndex, a: MultiIndex) -> bool:
    return is_descendant(a, c)


def dominates(b: MultiIndex, a: MultiIndex) -> bool:
    """b >= a componentwise (non-strict)."""
    _same_length(a, b)
    return all(x >= y for x, y in zip(b, a))


def minimal_elements(s: Iterable[MultiIndex]) -> list[MultiIndex]:
    items = sorted(set(s))
    return [a for a in items if not any(is_descendant(a, b) for b in items)]


@dataclass(frozen=True)
class Box:
    """The finite window {b : 0 <= b_i <= upper_i}."""

    upper: MultiIndex

    def __post_init__(self):
        object.__setattr__(self, "upper", multi_index(self.upper))

    @classmethod
    def for_degree(cls, k: int, deg: int) -> "Box":
        """Window with upper_i = deg - 1, beyond which h^1 of a degree-deg scheme vanishes."""
        return cls((max(deg - 1, 0),) * k)

    @classmethod
    def cube(cls, k: int, side: int) -> "Box":
        return cls((side,) * k)

    @property
    def k(self) -> int:
        return len(self.upper)

    def __len__(self) -> int:
        n = 1
        for u in self.upper:
            n *= u + 1
        return n

    def __iter__(self) -> Iterator[MultiIndex]:
        return itertools.product(*(range(u + 1) for u in self.upper))

    def __contains__(self, a) -> bool:
        return len(a) == self.k and all(0 <= x <= u for x, u in zip(a, self.upper))

    def widened(self, by: int = 1) -> "Box":
        return Box(tuple(u + by for u in self.upper))
