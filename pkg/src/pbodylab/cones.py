"""Exact rational polyhedral cones.

A cone is stored in both representations: the generators it was built from and
its irredundant facet inequalities n . x >= 0 with primitive inward normals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _linalg as la
from .lattice import DimensionError, Point, WeightVector, as_point, check_dims

MAX_CONE_DIM = 4


class ConeError(ValueError):
    pass


@dataclass(frozen=True)
class RationalCone:
    generators: tuple[Point, ...]
    facets: tuple[Point, ...]  # inward normals; the cone is {x : n.x >= 0}

    @property
    def dim(self) -> int:
        return len(self.facets[0]) if self.facets else len(self.generators[0])

    @cached_property
    def rank(self) -> int:
        return la.rank([g for g in self.generators if any(g)])

    @property
    def full_dimensional(self) -> bool:
        return self.rank == self.dim

    @cached_property
    def is_orthant(self) -> bool:
        d = self.dim
        units = {tuple(int(i == k) for i in range(d)) for k in range(d)}
        return set(self.facets) == units

    @cached_property
    def normal_matrix(self) -> np.ndarray:
        return np.array(self.facets, dtype=np.int64).reshape(len(self.facets), self.dim)

    def contains(self, x: Sequence) -> bool:
        return all(sum(n_i * x_i for n_i, x_i in zip(n, x)) >= 0 for n in self.facets)

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        if not self.facets:
            return np.ones(len(pts), dtype=bool)
        return np.all(pts @ self.normal_matrix.T >= 0, axis=1)

    @cached_property
    def extreme_rays(self) -> tuple[Point, ...]:
        """One generator per extreme ray (the shortest one on that ray)."""
        d = self.dim
        rays: dict[Point, Point] = {}
        for g in self.generators:
            if not any(g):
                continue
            tight = [n for n in self.facets if sum(a * b for a, b in zip(n, g)) == 0]
            if tight and la.rank(tight) == d - 1 or (d == 1):
                key = la.primitive(g)
                if key not in rays or sum(map(abs, g)) < sum(map(abs, rays[key])):
                    rays[key] = g
        return tuple(sorted(rays.values()))


def cone_from_generators(gens: Sequence[Sequence[int]]) -> RationalCone:
    """Facet description of Cone(gens).

    Every (d-1)-subset of generators, padded with a basis of the orthogonal
    complement of their span, defines a candidate hyperplane; it is kept when
    all generators lie on one side of it. For d <= 4 this is cheap and exact.
    """
    gens = [as_point(g) for g in gens]
    if not gens:
        raise ConeError("empty generator list")
    d = check_dims(*gens)
    if d > MAX_CONE_DIM:
        raise DimensionError(f"cone geometry supports d <= {MAX_CONE_DIM}, got {d}")
    nonzero = sorted({g for g in gens if any(g)})
    complement = la.nullspace(nonzero, d) if nonzero else [
        tuple(int(i == k) for i in range(d)) for k in range(d)]
    pool = nonzero + complement
    found: set[Point] = set()
    for subset in itertools.combinations(pool, d - 1):
        n = la.cross(subset)
        if not any(n):
            continue
        n = la.primitive(n)
        vals = [sum(a * b for a, b in zip(n, g)) for g in nonzero]
        if all(v >= 0 for v in vals):
            found.add(n)
        if all(v <= 0 for v in vals):
            found.add(tuple(-x for x in n))
    return RationalCone(generators=tuple(sorted(set(gens))), facets=tuple(sorted(found)))


def is_pointed(cone: RationalCone) -> bool:
    return la.rank(cone.facets) == cone.dim if cone.facets else False


def is_pointed_with_witness(cone: RationalCone) -> WeightVector | None:
    """A functional strictly positive on cone minus the origin, or None.

    The sum of the facet normals always works for a pointed cone. A
    componentwise-positive choice is preferred when one is at hand.
    """
    if not is_pointed(cone):
        return None
    d = cone.dim
    nonzero = [g for g in cone.generators if any(g)]
    if not nonzero:
        return WeightVector.ones(d)
    total = tuple(sum(n[i] for n in cone.facets) for i in range(d))
    if any(x <= 0 for x in total) and all(x >= 0 for g in nonzero for x in g):
        total = (1,) * d  # cone sits in the orthant
    return WeightVector(tuple(Fraction(x) for x in total))


@dataclass(frozen=True)
class TruncatingHalfspace:
    """The open halfspace {u : (a, u) < alpha}."""

    a: WeightVector
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    def scaled(self, q) -> "TruncatingHalfspace":
        return TruncatingHalfspace(self.a, self.alpha * q)

    def contains(self, u: Sequence) -> bool:
        return self.a.value(u) < self.alpha

    def check_truncates(self, cone: RationalCone) -> None:
        if not is_pointed(cone) or not cone.full_dimensional:
            raise ConeError("truncation needs a pointed full-dimensional cone")
        for g in cone.generators:
            if any(g) and self.a.value(g) <= 0:
                raise ConeError(f"weights {self.a.weights} are not positive on generator {g}")


def _orient(vertices: Sequence[Sequence[Fraction]], p: Sequence[Fraction]) -> Fraction:
    v0 = vertices[0]
    rows = [[x - y for x, y in zip(v, v0)] for v in vertices[1:]]
    rows.append([x - y for x, y in zip(p, v0)])
    return la.det(rows)


def placing_triangulation(points: Sequence[Sequence[Fraction]]) -> list[tuple[int, ...]]:
    """Placing (lexicographic) triangulation of a full-dimensional point set.

    Points are inserted in the given order; each new point outside the current
    hull is coned over the boundary facets it sees. Returns index tuples.
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]
    d = len(pts[0])
    chosen = [0]
    for i in range(1, len(pts)):
        base = pts[chosen[0]]
        rows = [[x - y for x, y in zip(pts[j], base)] for j in chosen[1:] + [i]]
        if la.rank(rows) == len(rows):
            chosen.append(i)
        if len(chosen) == d + 1:
            break
    if len(chosen) < d + 1:
        raise ConeError("point set is not full-dimensional")
    simplices = [tuple(sorted(chosen))]
    for i in range(len(pts)):
        if i in chosen:
            continue
        faces: dict[tuple[int, ...], list[int]] = {}
        for s in simplices:
            for drop in s:
                face = tuple(v for v in s if v != drop)
                faces.setdefault(face, []).append(drop)
        new = []
        for face, opposite in faces.items():
            if len(opposite) != 1:
                continue
            verts = [pts[v] for v in face]
            side_p = _orient(verts, pts[i])
            side_o = _orient(verts, pts[opposite[0]])
            if side_p != 0 and (side_p > 0) != (side_o > 0):
                new.append(tuple(sorted(face + (i,))))
        simplices.extend(new)
    return simplices


def simplex_volume(vertices: Sequence[Sequence[Fraction]]) -> Fraction:
    v0 = vertices[0]
    rows = [[x - y for x, y in zip(v, v0)] for v in vertices[1:]]
    return abs(la.det(rows)) / math.factorial(len(v0))


def triangulate(cone: RationalCone, a: WeightVector | None = None) -> list[tuple[Point, ...]]:
    """Split a pointed full-dimensional cone into simplicial cones over its generators."""
    if a is None:
        a = is_pointed_with_witness(cone)
    if a is None or not cone.full_dimensional:
        raise ConeError("triangulation needs a pointed full-dimensional cone")
    gens = [g for g in cone.generators if any(g)]
    d = cone.dim
    origin = (Fraction(0),) * d
    pts = [origin] + [tuple(Fraction(x) / a.value(g) for x in g) for g in gens]
    out = []
    for s in placing_triangulation(pts):
        # the origin is a vertex of every simplex (cross-section points are coplanar)
        out.append(tuple(gens[i - 1] for i in s if i != 0))
    return out


def cross_section_volume(cone: RationalCone, a: WeightVector) -> Fraction:
    """Vol(C ∩ {(a, x) < 1})."""
    total = Fraction(0)
    d = cone.dim
    origin = (Fraction(0),) * d
    for rays in triangulate(cone, a):
        verts = [origin] + [tuple(Fraction(x) / a.value(g) for x in g) for g in rays]
        total += simplex_volume(verts)
    return total


def truncated_cone_volume(cone: RationalCone, H: TruncatingHalfspace) -> Fraction:
    """Exact Vol(C ∩ H_alpha) = alpha^d Vol(C ∩ H_1)."""
    H.check_truncates(cone)
    return H.alpha ** cone.dim * cross_section_volume(cone, H.a)


def truncation_bounding_box(cone: RationalCone, H: TruncatingHalfspace) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Axis-aligned box [lo, hi] containing C ∩ H (vertices 0 and alpha*g/(a,g))."""
    d = cone.dim
    verts = [(Fraction(0),) * d]
    for g in cone.extreme_rays:
        s = H.alpha / H.a.value(g)
        verts.append(tuple(s * x for x in g))
    lo = tuple(min(v[i] for v in verts) for i in range(d))
    hi = tuple(max(v[i] for v in verts) for i in range(d))
    return lo, hi
