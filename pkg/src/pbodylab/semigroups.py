"""Standard affine semigroups, their ideals, and p-systems of ideals."""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _linalg as la
from .cones import RationalCone, cone_from_generators, is_pointed, is_pointed_with_witness, triangulate
from .lattice import Point, WeightVector, as_point, check_dims, enumerate_box


class NotStandard(ValueError):
    def __init__(self, reason: str):
        super().__init__(f"semigroup is not standard: {reason}")
        self.reason = reason


class NotInSemigroup(ValueError):
    pass


def _unit(d: int, k: int) -> Point:
    return tuple(int(i == k) for i in range(d))


class StandardSemigroup:
    """A finitely generated S in Z^d with S - S = Z^d and a pointed cone.

    Build instances with `make_standard_semigroup`. Membership in a normal
    semigroup is a facet check; otherwise a memoized search subtracts
    generators (the witness strictly decreases, so the search is finite).
    """

    def __init__(self, generators: Sequence[Point], cone: RationalCone, witness: WeightVector):
        self.generators: tuple[Point, ...] = tuple(sorted({g for g in generators if any(g)}))
        self.cone = cone
        self.witness = witness
        self.dim = cone.dim
        self._memo: dict[Point, bool] = {}
        self._lock = threading.Lock()
        d = self.dim
        self.is_regular = all(min(g) >= 0 for g in self.generators) and all(
            _unit(d, k) in self.generators for k in range(d))
        self.is_normal = self.is_regular or self._check_normal()
        self._gen_array = np.array(self.generators, dtype=np.int64)

    def __repr__(self):
        return f"StandardSemigroup({list(self.generators)})"

    def __eq__(self, other):
        return isinstance(other, StandardSemigroup) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def degree(self, u: Sequence) -> Fraction:
        return self.witness.value(u)

    def _check_normal(self) -> bool:
        # S is normal iff each half-open fundamental parallelepiped of a
        # triangulation of the cone has all its lattice points in S
        for rays in triangulate(self.cone, self.witness):
            lo = [sum(min(0, r[i]) for r in rays) for i in range(self.dim)]
            hi = [sum(max(0, r[i]) for r in rays) + 1 for i in range(self.dim)]
            for x in enumerate_box(tuple(lo), tuple(hi)):
                lam = la.solve(rays, x)
                if all(0 <= c < 1 for c in lam) and not self._search(x):
                    return False
        return True

    def contains(self, u: Sequence[int]) -> bool:
        u = tuple(int(x) for x in u)
        if not self.cone.contains(u):
            return False
        if self.is_normal:
            return True
        return self._search(u)

    def _search(self, u: Point) -> bool:
        memo = self._memo
        if not any(u):
            return True
        hit = memo.get(u)
        if hit is not None:
            return hit
        stack = [u]
        while stack:
            v = stack[-1]
            if v in memo:
                stack.pop()
                continue
            result = None
            pending = None
            for g in self.generators:
                w = tuple(a - b for a, b in zip(v, g))
                if not any(w):
                    result = True
                    break
                if not self.cone.contains(w):
                    continue
                known = memo.get(w)
                if known:
                    result = True
                    break
                if known is None and pending is None:
                    pending = w
            if result is None and pending is not None:
                stack.append(pending)
                continue
            with self._lock:
                memo[v] = bool(result)
            stack.pop()
        return memo[u]

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.dim)
        if self.is_regular:
            return np.all(pts >= 0, axis=1)
        inside = self.cone.contains_many(pts)
        if self.is_normal:
            return inside
        out = np.zeros(len(pts), dtype=bool)
        for i in np.flatnonzero(inside):
            out[i] = self._search(tuple(int(x) for x in pts[i]))
        return out


def make_standard_semigroup(gens: Iterable[Sequence[int]], a: WeightVector | Sequence | None = None) -> StandardSemigroup:
    gens = [as_point(g) for g in gens]
    if not gens:
        raise ValueError("empty generator list")
    d = check_dims(*gens)
    cone = cone_from_generators(gens)
    if not cone.full_dimensional:
        raise NotStandard("cone not full-dimensional")
    if not is_pointed(cone):
        raise NotStandard("cone not pointed")
    if la.lattice_index(gens, d) != 1:
        raise NotStandard("differences do not generate Z^d")
    if a is None:
        witness = is_pointed_with_witness(cone)
    else:
        witness = a if isinstance(a, WeightVector) else WeightVector.of(a)
        check_dims(witness.weights, gens[0])
        bad = [g for g in gens if any(g) and witness.value(g) <= 0]
        if bad:
            raise ValueError(f"weights {witness.weights} are not positive on generator {bad[0]}")
    return StandardSemigroup(gens, cone, witness)


def regular_semigroup(d: int, a: WeightVector | Sequence | None = None) -> StandardSemigroup:
    """N^d."""
    return make_standard_semigroup([_unit(d, k) for k in range(d)], a)


def semigroup_membership(S: StandardSemigroup, u: Sequence[int]) -> bool:
    return S.contains(u)


def _minimal_dominance(pts: np.ndarray) -> np.ndarray:
    """Rows of pts not dominating another row (N^d minimalization)."""
    if len(pts) == 0:
        return pts
    pts = np.unique(pts, axis=0)  # sorted lexicographically
    if pts.shape[1] == 1:
        return pts[:1]
    if pts.shape[1] == 2:
        # lexicographic order: keep a point iff its y beats every earlier y
        ys = pts[:, 1]
        prev_min = np.minimum.accumulate(np.concatenate(([np.iinfo(np.int64).max], ys[:-1])))
        return pts[ys < prev_min]
    keep = np.ones(len(pts), dtype=bool)
    for start in range(0, len(pts), 512):
        block = pts[start:start + 512]
        le = np.all(pts[None, :, :] <= block[:, None, :], axis=2)
        le[np.arange(len(block)), np.arange(start, start + len(block))] = False
        keep[start:start + len(block)] = ~le.any(axis=1)
    return pts[keep]


def minimalize(S: StandardSemigroup, gens: Iterable[Sequence[int]]) -> list[Point]:
    """Drop generators lying in another generator's translate; sorted output."""
    pts = sorted({tuple(int(x) for x in g) for g in gens})
    for g in pts:
        if not S.contains(g):
            raise NotInSemigroup(f"{g} is not in {S}")
    if not pts:
        return []
    if S.is_regular:
        arr = _minimal_dominance(np.array(pts, dtype=np.int64))
        return [tuple(int(x) for x in row) for row in arr]
    # a point with smaller witness value can never sit above one with larger
    order = sorted(pts, key=lambda g: (S.degree(g), g))
    kept: list[Point] = []
    for g in order:
        if not any(S.contains(tuple(x - y for x, y in zip(g, t))) for t in kept):
            kept.append(g)
    return sorted(kept)


class SemigroupIdeal:
    """T = union of (t + S) over a finite minimal generator list."""

    def __init__(self, parent: StandardSemigroup, generators: Iterable[Sequence[int]], *, minimal: bool = False):
        self.parent = parent
        gens = [tuple(int(x) for x in g) for g in generators]
        self.generators: tuple[Point, ...] = tuple(sorted(set(gens)) if minimal else minimalize(parent, gens))
        self._arr = np.array(self.generators, dtype=np.int64).reshape(-1, parent.dim)

    def __repr__(self):
        return f"SemigroupIdeal({list(self.generators)})"

    def __eq__(self, other):
        return (isinstance(other, SemigroupIdeal) and self.parent == other.parent
                and self.generators == other.generators)

    def __hash__(self):
        return hash((self.parent, self.generators))

    @property
    def array(self) -> np.ndarray:
        return self._arr

    def contains(self, u: Sequence[int]) -> bool:
        u = tuple(int(x) for x in u)
        if self.parent.is_regular:
            return any(all(a >= b for a, b in zip(u, t)) for t in self.generators)
        return any(self.parent.contains(tuple(a - b for a, b in zip(u, t))) for t in self.generators)

    def contains_many(self, pts: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.parent.dim)
        out = np.zeros(len(pts), dtype=bool)
        S = self.parent
        for start in range(0, len(pts), chunk):
            block = pts[start:start + chunk]
            hit = np.zeros(len(block), dtype=bool)
            for t in self._arr:
                rest = ~hit
                if not rest.any():
                    break
                hit[rest] = S.contains_many(block[rest] - t)
            out[start:start + chunk] = hit
        return out

    def scaled(self, k: int) -> "SemigroupIdeal":
        """k*T + S."""
        gens = [tuple(k * x for x in t) for t in self.generators]
        return SemigroupIdeal(self.parent, gens, minimal=self.parent.is_regular and k > 0)


def ideal_membership(T: SemigroupIdeal, u: Sequence[int]) -> bool:
    return T.contains(u)


class PSystem:
    """A rule e -> T_{p^e}, with lazily cached ideals."""

    def __init__(self, parent: StandardSemigroup, p: int, rule: Callable[[int], SemigroupIdeal | Iterable[Sequence[int]]], name: str = ""):
        if p < 2 or any(p % k == 0 for k in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"p = {p} is not prime")
        self.parent = parent
        self.p = p
        self.rule = rule
        self.name = name
        self.validated_up_to = -1
        self._cache: dict[int, SemigroupIdeal] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"PSystem({self.name or self.rule!r}, p={self.p})"

    def q(self, e: int) -> int:
        return self.p ** e

    def ideal(self, e: int) -> SemigroupIdeal:
        if e < 0:
            raise ValueError("e must be >= 0")
        hit = self._cache.get(e)
        if hit is None:
            T = self.rule(e)
            if not isinstance(T, SemigroupIdeal):
                T = SemigroupIdeal(self.parent, T)
            with self._lock:
                hit = self._cache.setdefault(e, T)
        return hit


@dataclass(frozen=True)
class Violation:
    e: int
    generator: Point
    witness: Point  # p * generator, missing from T_{p^(e+1)}


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    e_max: int
    violation: Violation | None = None

    def describe(self) -> str:
        if self.ok:
            return f"axiom holds for e < {self.e_max}"
        v = self.violation
        return f"axiom fails at e={v.e}: p*{v.generator} = {v.witness} not in the next ideal"


def validate_p_system(system: PSystem, e_max: int) -> ValidationReport:
    """Check p * T_{p^e} ⊆ T_{p^(e+1)} on generators for every e < e_max."""
    if e_max < 1:
        raise ValueError("e_max must be >= 1")
    p = system.p
    for e in range(e_max):
        T, nxt = system.ideal(e), system.ideal(e + 1)
        if not len(T.generators):
            continue
        images = p * T.array
        ok = nxt.contains_many(images)
        if not ok.all():
            i = int(np.flatnonzero(~ok)[0])
            t = T.generators[i]
            return ValidationReport(False, e_max, Violation(e, t, tuple(p * x for x in t)))
    system.validated_up_to = max(system.validated_up_to, e_max)
    return ValidationReport(True, e_max)


def compositions(n: int, d: int) -> list[Point]:
    """All u in N^d with coordinate sum n."""
    if d == 1:
        return [(n,)]
    return [(k,) + rest for k in range(n, -1, -1) for rest in compositions(n - k, d - 1)]


def full_system(S: StandardSemigroup, p: int) -> PSystem:
    """T_q = S."""
    zero = (0,) * S.dim
    return PSystem(S, p, lambda e: SemigroupIdeal(S, [zero], minimal=True), name="S")


def constant_system(T: SemigroupIdeal, p: int) -> PSystem:
    """T_q = T + S for every q."""
    return PSystem(T.parent, p, lambda e: T, name=f"const{list(T.generators)}")


def frobenius_system(T: SemigroupIdeal, p: int) -> PSystem:
    """T_q = q T + S."""
    return PSystem(T.parent, p, lambda e: T.scaled(p ** e), name=f"frob{list(T.generators)}")


def degree_system(S: StandardSemigroup, p: int, level: Callable[[int], int] = lambda q: q, name: str = "") -> PSystem:
    """T_q = {u in N^d : u_1 + ... + u_d >= level(q)} (regular S only)."""
    if not S.is_regular:
        raise ValueError("degree systems are defined on N^d")
    d = S.dim
    return PSystem(S, p, lambda e: SemigroupIdeal(S, compositions(level(p ** e), d), minimal=True),
                   name=name or "degree")


def corner_system(S: StandardSemigroup, p: int, corners: Sequence[Sequence[Fraction]]) -> PSystem:
    """T_q = union of (ceil(q v) + S) over rational corners v."""
    corners = [tuple(Fraction(x) for x in v) for v in corners]

    def rule(e):
        q = p ** e
        return SemigroupIdeal(S, [tuple(math.ceil(q * x) for x in v) for v in corners])

    return PSystem(S, p, rule, name=f"corners{[tuple(str(x) for x in v) for v in corners]}")
