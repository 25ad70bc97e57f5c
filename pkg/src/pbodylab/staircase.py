"""Geometry of unions of translated orthants (staircases) in R^d.

Everything here assumes the ambient cone is the non-negative orthant. Lattice
counts use column thresholds; volumes are exact rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

IE_MAX_GENERATORS = 20
_INF = np.iinfo(np.int64).max // 4


def column_thresholds(gens: np.ndarray, prefix_hi: Sequence[int], cap: int = _INF) -> np.ndarray:
    """For each prefix x in [0, prefix_hi), the least last coordinate in T over x.

    T is the union of t + N^d. The value is min(cap, min t_d over generators
    with t_{<d} <= x), so column x of T is {(x, y) : y >= thresholds[x]}.
    """
    gens = np.asarray(gens, dtype=np.int64)
    d = gens.shape[1]
    shape = tuple(int(h) for h in prefix_hi)
    M = np.full(shape, cap, dtype=np.int64)
    if d == 1:
        if len(gens):
            M[()] = min(cap, int(gens[:, 0].min()))
        return M
    if any(s <= 0 for s in shape):
        return M
    pre = gens[:, :-1]
    ok = np.all((pre >= 0) & (pre < np.array(shape)), axis=1)
    if ok.any():
        np.minimum.at(M, tuple(pre[ok].T), gens[ok, -1])
    for axis in range(d - 1):
        M = np.minimum.accumulate(M, axis=axis)
    return M


def inclusion_exclusion(corners: Sequence[Sequence], volume: Callable[[tuple], Fraction],
                        vanishes: Callable[[tuple], bool]) -> Fraction:
    """Vol of the union of (t + orthant) pieces by inclusion-exclusion over joins.

    `volume(j)` is the measure of (j + orthant) inside the region of interest and
    `vanishes(j)` must be monotone: once a join has measure zero so do all larger
    joins, which prunes the subset tree.
    """
    corners = [tuple(c) for c in corners]
    n = len(corners)
    if n > IE_MAX_GENERATORS:
        raise ValueError(f"inclusion-exclusion capped at {IE_MAX_GENERATORS} generators")
    total = Fraction(0)
    stack = [(i, corners[i], 1) for i in range(n)]
    while stack:
        i, join, size = stack.pop()
        if vanishes(join):
            continue
        total += volume(join) if size % 2 else -volume(join)
        for k in range(i + 1, n):
            stack.append((k, tuple(max(a, b) for a, b in zip(join, corners[k])), size + 1))
    return total


def complement_boxes(corners: Sequence[Sequence], hi: Sequence) -> list[tuple[tuple, tuple]]:
    """Disjoint boxes [lo, up) tiling [0, hi) minus the union of (t + orthant)."""
    hi = tuple(hi)
    d = len(hi)
    live = [tuple(t) for t in corners if all(x < h for x, h in zip(t, hi))]
    if d == 1:
        m = min([t[0] for t in live] + [hi[0]])
        m = max(m, 0)
        return [((0,), (m,))] if m > 0 else []
    live.sort(key=lambda t: t[-1])
    cuts = sorted({max(t[-1], 0) for t in live} | {0, hi[-1]})
    out = []
    active: list[tuple] = []
    j = 0
    run_min = hi[0]
    for z0, z1 in zip(cuts, cuts[1:]):
        while j < len(live) and live[j][-1] <= z0:
            active.append(live[j][:-1])
            run_min = min(run_min, live[j][0])
            j += 1
        if d == 2:
            if run_min > 0:
                out.append(((0, z0), (run_min, z1)))
            continue
        for lo, up in complement_boxes(active, hi[:-1]):
            out.append((lo + (z0,), up + (z1,)))
    return out


def _corner_simplex(a: Sequence[Fraction], alpha: Fraction) -> Callable[[tuple], Fraction]:
    d = len(a)
    denom = math.factorial(d) * math.prod(a)

    def vol(v):
        r = alpha - sum(x * y for x, y in zip(a, v))
        return r ** d / denom if r > 0 else Fraction(0)

    return vol


def box_halfspace_volume(lo: Sequence, up: Sequence, a: Sequence[Fraction], alpha: Fraction) -> Fraction:
    """Vol([lo, up] ∩ {(a, x) < alpha}) for strictly positive a."""
    d = len(a)
    f = _corner_simplex(a, alpha)
    total = Fraction(0)
    for mask in range(1 << d):
        v = tuple(up[i] if mask >> i & 1 else lo[i] for i in range(d))
        term = f(v)
        total += -term if bin(mask).count("1") % 2 else term
    return total


def orthant_volume_below(a: Sequence[Fraction], alpha: Fraction) -> Fraction:
    """Vol(R^d_{>=0} ∩ {(a, x) < alpha})."""
    return _corner_simplex(a, alpha)((0,) * len(a))


def union_volume_below(corners: Sequence[Sequence], a: Sequence[Fraction], alpha: Fraction) -> Fraction:
    """Vol(union of (t + orthant), cut by {(a, x) < alpha}); a strictly positive."""
    a = [Fraction(x) for x in a]
    alpha = Fraction(alpha)
    if not corners:
        return Fraction(0)
    if len(corners) <= IE_MAX_GENERATORS:
        f = _corner_simplex(a, alpha)
        return inclusion_exclusion(corners, f, lambda j: sum(x * y for x, y in zip(a, j)) >= alpha)
    # complement of the union inside the bounding box of the truncated orthant
    hi = tuple(alpha / w for w in a)
    gap = sum((box_halfspace_volume(lo, up, a, alpha) for lo, up in complement_boxes(corners, hi)),
              Fraction(0))
    return orthant_volume_below(a, alpha) - gap


def staircase_volume(corners: Sequence[Sequence[int]], bounds: Sequence[int]) -> Fraction:
    """Vol([0, bounds) minus the union of (t + orthant)) for integer corners."""
    bounds = tuple(bounds)
    box = Fraction(math.prod(bounds))
    if len(corners) <= IE_MAX_GENERATORS:
        def vol(j):
            return Fraction(math.prod(max(0, b - x) for b, x in zip(bounds, j)))

        covered = inclusion_exclusion(corners, vol, lambda j: any(x >= b for x, b in zip(j, bounds)))
        return box - covered
    return Fraction(sum(math.prod(u - l for l, u in zip(lo, up))
                        for lo, up in complement_boxes(corners, bounds)))
