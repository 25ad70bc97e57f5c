"""Integer lattice points, weight orderings and box enumeration.

Points are plain tuples of Python ints, so arithmetic never overflows.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Sequence

import numpy as np

Point = tuple[int, ...]
RationalPoint = tuple[Fraction, ...]

MAX_DIM = 6


class DimensionError(ValueError):
    """Raised when vectors of different ambient dimension are combined."""


def as_point(coords: Iterable[int]) -> Point:
    pt = tuple(coords)
    for c in pt:
        if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
            raise TypeError(f"lattice coordinates must be integers, got {c!r}")
    pt = tuple(int(c) for c in pt)
    if not 1 <= len(pt) <= MAX_DIM:
        raise DimensionError(f"dimension {len(pt)} outside 1..{MAX_DIM}")
    return pt


def check_dims(*vectors: Sequence) -> int:
    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def add(u: Point, v: Point) -> Point:
    check_dims(u, v)
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Point, v: Point) -> Point:
    check_dims(u, v)
    return tuple(a - b for a, b in zip(u, v))


def scale(k: int, u: Point) -> Point:
    return tuple(k * a for a in u)


def dominates(u: Sequence, v: Sequence) -> bool:
    """True when u >= v componentwise."""
    return all(a >= b for a, b in zip(u, v))


def dot(a: Sequence, u: Sequence):
    check_dims(a, u)
    return sum(x * y for x, y in zip(a, u))


@dataclass(frozen=True)
class WeightVector:
    """A linear functional u -> (a, u) with exact rational coefficients.

    The valuation weights of a power series ring are strictly positive; cone
    witnesses in general need not be, so positivity is exposed as a property
    and enforced by callers that need it.
    """

    weights: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if not w:
            raise DimensionError("weight vector must be nonempty")
        if all(x == 0 for x in w):
            raise ValueError("weight vector must be nonzero")
        object.__setattr__(self, "weights", w)

    @classmethod
    def of(cls, *weights) -> "WeightVector":
        if len(weights) == 1 and not isinstance(weights[0], (int, Fraction, str)):
            weights = tuple(weights[0])
        return cls(tuple(Fraction(x) for x in weights))

    @classmethod
    def ones(cls, d: int) -> "WeightVector":
        return cls((Fraction(1),) * d)

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def is_positive(self) -> bool:
        return all(x > 0 for x in self.weights)

    @property
    def common_denominator(self) -> int:
        return lcm(*(x.denominator for x in self.weights))

    def integer_weights(self) -> tuple[int, ...]:
        """Weights scaled by `common_denominator`, as ints."""
        L = self.common_denominator
        return tuple(int(x * L) for x in self.weights)

    def value(self, u: Sequence) -> Fraction:
        check_dims(self.weights, u)
        return sum((w * x for w, x in zip(self.weights, u)), Fraction(0))

    def __iter__(self):
        return iter(self.weights)

    def __len__(self):
        return len(self.weights)


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def a_compare(a: WeightVector, u: Point, v: Point) -> Ordering:
    """Compare by (a, u) vs (a, v); exact ties fall back to lexicographic order."""
    check_dims(a.weights, u, v)
    au, av = a.value(u), a.value(v)
    if au != av:
        return Ordering.LESS if au < av else Ordering.GREATER
    if tuple(u) == tuple(v):
        return Ordering.EQUAL
    return Ordering.LESS if tuple(u) < tuple(v) else Ordering.GREATER


def enumerate_box(lo: Point, hi: Point) -> Iterator[Point]:
    """Yield every x with lo <= x < hi componentwise, in lexicographic order."""
    check_dims(lo, hi)
    return itertools.product(*(range(l, h) for l, h in zip(lo, hi)))


def box_size(lo: Point, hi: Point) -> int:
    check_dims(lo, hi)
    n = 1
    for l, h in zip(lo, hi):
        n *= max(0, h - l)
    return n


def box_array(lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
    """Same points as `enumerate_box`, as an (n, d) int64 array."""
    axes = [np.arange(l, h, dtype=np.int64) for l, h in zip(lo, hi)]
    if any(ax.size == 0 for ax in axes):
        return np.empty((0, len(axes)), dtype=np.int64)
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def split_range(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    """Partition [lo, hi) into at most `parts` contiguous slabs."""
    n = max(0, hi - lo)
    parts = max(1, min(parts, n or 1))
    step, extra = divmod(n, parts)
    out, start = [], lo
    for i in range(parts):
        stop = start + step + (1 if i < extra else 0)
        out.append((start, stop))
        start = stop
    return out
