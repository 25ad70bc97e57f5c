"""Monomial ideals in K[[x_1..x_d]] and in semigroup rings K[[S]].

A monomial ideal is identified with its staircase: the semigroup ideal of
exponents of the monomials it contains. Lengths of quotients are then counts
of semigroup points outside the staircase.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import staircase
from .cones import TruncatingHalfspace, truncation_bounding_box
from .lattice import Point, WeightVector
from .reports import ConvergenceReport
from .semigroups import (
    PSystem,
    SemigroupIdeal,
    StandardSemigroup,
    ValidationReport,
    Violation,
    make_standard_semigroup,
    regular_semigroup,
)


class NotMPrimary(ValueError):
    pass


class FamilyAxiomError(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(report.describe())
        self.report = report


class ToricRing:
    """K[[S]] in characteristic p, with monomial valuation weights a."""

    def __init__(self, semigroup: StandardSemigroup, p: int, a: WeightVector | Sequence | None = None):
        if p < 2 or any(p % k == 0 for k in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"p = {p} is not prime")
        if a is None:
            a = semigroup.witness
        elif not isinstance(a, WeightVector):
            a = WeightVector.of(a)
        if a.dim != semigroup.dim:
            raise ValueError("weight vector has the wrong dimension")
        if not a.is_positive:
            raise ValueError("valuation weights must be strictly positive")
        if semigroup.witness != a:
            semigroup = make_standard_semigroup(semigroup.generators, a)
        self.semigroup = semigroup
        self.p = p
        self.a = a
        self.dim = semigroup.dim

    @classmethod
    def power_series(cls, d: int, p: int, a=None) -> "ToricRing":
        return cls(regular_semigroup(d, a), p, a)

    @classmethod
    def affine(cls, gens: Iterable[Sequence[int]], p: int, a=None) -> "ToricRing":
        return cls(make_standard_semigroup(gens, a), p, a)

    @property
    def regular(self) -> bool:
        return self.semigroup.is_regular

    def __repr__(self):
        kind = "regular" if self.regular else f"semigroup {list(self.semigroup.generators)}"
        return f"ToricRing(d={self.dim}, p={self.p}, {kind}, a={[str(x) for x in self.a]})"

    def __eq__(self, other):
        return (isinstance(other, ToricRing) and self.semigroup == other.semigroup
                and self.p == other.p and self.a == other.a)

    def __hash__(self):
        return hash((self.semigroup, self.p, self.a))

    def ideal(self, gens: Iterable[Sequence[int]]) -> "MonomialIdeal":
        return MonomialIdeal(self, SemigroupIdeal(self.semigroup, gens))

    def maximal_ideal(self) -> "MonomialIdeal":
        return self.ideal(self.semigroup.generators)

    def unit_ideal(self) -> "MonomialIdeal":
        return self.ideal([(0,) * self.dim])

    def degree(self, u: Sequence[int]) -> Fraction:
        """(a, u) / max(a): the exponent bound behind D ∩ F_{>= n v} ⊆ m^n."""
        return self.a.value(u) / max(self.a.weights)


class MonomialIdeal:
    def __init__(self, ring: ToricRing, staircase_: SemigroupIdeal):
        if staircase_.parent != ring.semigroup:
            raise ValueError("staircase lives in a different semigroup")
        self.ring = ring
        self.staircase = staircase_
        self._bounds: tuple[int, ...] | None = None

    @property
    def generators(self) -> tuple[Point, ...]:
        return self.staircase.generators

    def __repr__(self):
        return f"MonomialIdeal({list(self.generators)})"

    def __eq__(self, other):
        return isinstance(other, MonomialIdeal) and self.ring == other.ring and self.staircase == other.staircase

    def __hash__(self):
        return hash((self.ring, self.staircase))

    def contains(self, u) -> bool:
        return self.staircase.contains(u)

    def power_bounds(self) -> tuple[int, ...]:
        """For each generator h of S, the least N with N h in the staircase.

        Finite for every h exactly when the ideal is m-primary.
        """
        if self._bounds is None:
            S = self.ring.semigroup
            out = []
            for h in S.generators:
                out.append(_least_multiple_inside(self.staircase, h))
            self._bounds = tuple(out)
        return self._bounds

    @property
    def is_m_primary(self) -> bool:
        try:
            self.power_bounds()
        except NotMPrimary:
            return False
        return True


def _least_multiple_inside(T: SemigroupIdeal, h: Point, cap: int = 1 << 20) -> int:
    S = T.parent
    if T.contains((0,) * S.dim):
        return 0
    face = [n for n in S.cone.facets if sum(a * b for a, b in zip(n, h)) == 0]
    if not any(all(sum(a * b for a, b in zip(n, t)) == 0 for n in face) for t in T.generators):
        raise NotMPrimary(f"no power of the monomial with exponent {h} lies in the ideal")
    hi = 1
    while not T.contains(tuple(hi * x for x in h)):
        hi *= 2
        if hi > cap:
            raise NotMPrimary(f"no power of exponent {h} found below {cap}")
    lo = hi // 2  # lo is outside (or 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if T.contains(tuple(mid * x for x in h)):
            hi = mid
        else:
            lo = mid
    return hi


def _axis_bounds(I: MonomialIdeal) -> tuple[int, ...]:
    # regular ring: the power bounds are the pure-power exponents, in axis order
    S = I.ring.semigroup
    bounds = dict(zip(S.generators, I.power_bounds()))
    d = S.dim
    return tuple(bounds[tuple(int(i == k) for i in range(d))] for k in range(d))


def _complement_array(I: MonomialIdeal) -> np.ndarray:
    """All points of S outside the staircase (non-regular rings)."""
    S = I.ring.semigroup
    T = I.staircase
    bounds = I.power_bounds()
    d = S.dim
    if T.contains((0,) * d):
        return np.empty((0, d), dtype=np.int64)
    if not S.is_normal:
        zero = (0,) * d
        seen = {zero}
        todo = deque([zero])
        while todo:
            u = todo.popleft()
            for g in S.generators:
                v = tuple(x + y for x, y in zip(u, g))
                if v not in seen and not T.contains(v):
                    seen.add(v)
                    todo.append(v)
        return np.array(sorted(seen), dtype=np.int64)
    # every complement point is a sum with fewer than N_h copies of each h
    a = I.ring.a
    top = sum((n - 1) * a.value(h) for n, h in zip(bounds, S.generators))
    lo, hi = truncation_bounding_box(S.cone, TruncatingHalfspace(a, top + 1))
    lo = [math.floor(x) for x in lo]
    hi = [math.floor(x) + 1 for x in hi]
    aw = np.array(a.integer_weights(), dtype=np.int64)
    cap = int(top * a.common_denominator)
    chunks = []
    rest_lo, rest_hi = lo[1:], hi[1:]
    from .lattice import box_array
    tail = box_array(rest_lo, rest_hi)
    for x0 in range(lo[0], hi[0]):
        pts = np.concatenate([np.full((len(tail), 1), x0, dtype=np.int64), tail], axis=1) if d > 1 \
            else np.array([[x0]], dtype=np.int64)
        pts = pts[pts @ aw <= cap]
        pts = pts[S.contains_many(pts)]
        pts = pts[~T.contains_many(pts)]
        if len(pts):
            chunks.append(pts)
    return np.concatenate(chunks) if chunks else np.empty((0, d), dtype=np.int64)


def colength(I: MonomialIdeal, cache=None) -> int:
    """ell(R/I) = #(S minus staircase); raises NotMPrimary when infinite."""
    if cache is not None:
        hit = cache.get(I)
        if hit is not None:
            return hit
    if I.ring.regular:
        b = _axis_bounds(I)
        n = int(staircase.column_thresholds(I.staircase.array, b[:-1], b[-1]).sum(dtype=np.int64))
    else:
        n = len(_complement_array(I))
    if cache is not None:
        cache.put(I, n)
    return n


def deepest_gap(I: MonomialIdeal) -> tuple[Point, Fraction] | None:
    """A point of S outside the staircase with the largest normalized degree."""
    ring = I.ring
    aw = np.array(ring.a.integer_weights(), dtype=np.int64)
    if ring.regular:
        b = _axis_bounds(I)
        M = staircase.column_thresholds(I.staircase.array, b[:-1], b[-1])
        if not (M > 0).any():
            return None
        idx = np.argwhere(M > 0)
        tops = np.concatenate([idx, (M[M > 0] - 1).reshape(-1, 1)], axis=1) if ring.dim > 1 \
            else np.array([[int(M) - 1]])
    else:
        tops = _complement_array(I)
        if not len(tops):
            return None
    vals = tops @ aw
    pt = tuple(int(x) for x in tops[int(np.argmax(vals))])
    return pt, ring.degree(pt)


def _check_power_of_p(q: int, p: int) -> None:
    k = q
    while k > 1 and k % p == 0:
        k //= p
    if q < 1 or k != 1:
        raise ValueError(f"{q} is not a power of p = {p}")


def frobenius_power(I: MonomialIdeal, q: int) -> MonomialIdeal:
    """I^[q]: generated by q-th powers of the generators."""
    _check_power_of_p(q, I.ring.p)
    if q == 1:
        return I
    return MonomialIdeal(I.ring, I.staircase.scaled(q))


def _staircase_minima(pts: np.ndarray) -> np.ndarray:
    """Minimal elements of pts under dominance, via a column-threshold grid."""
    d = pts.shape[1]
    if d == 1:
        return pts[np.argmin(pts[:, 0])][None, :]
    hi = pts[:, :-1].max(axis=0) + 1
    if int(np.prod(hi)) > 1 << 24:
        from .semigroups import _minimal_dominance
        return _minimal_dominance(pts)
    inf = np.iinfo(np.int64).max
    M = staircase.column_thresholds(pts, hi, inf)
    # (x, M[x]) is a corner when M drops against every predecessor column
    corner = M < inf
    for axis in range(d - 1):
        prev = np.concatenate([np.full_like(M.take([0], axis=axis), inf),
                               M.take(range(M.shape[axis] - 1), axis=axis)], axis=axis)
        corner &= M < prev
    idx = np.argwhere(corner)
    return np.concatenate([idx, M[corner].reshape(-1, 1)], axis=1).astype(np.int64)


def _multiply(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    S = I.ring.semigroup
    A, B = I.staircase.array, J.staircase.array
    sums = (A[:, None, :] + B[None, :, :]).reshape(-1, S.dim)
    if S.is_regular:
        return MonomialIdeal(I.ring, SemigroupIdeal(S, _staircase_minima(sums), minimal=True))
    return MonomialIdeal(I.ring, SemigroupIdeal(S, np.unique(sums, axis=0)))


def ordinary_power(I: MonomialIdeal, n: int) -> MonomialIdeal:
    """I^n by square-and-multiply; staircases are re-minimalized after each product."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out, sq = None, I
    while True:
        if n & 1:
            out = sq if out is None else _multiply(out, sq)
        n >>= 1
        if not n:
            return out
        sq = _multiply(sq, sq)


def cartier_contraction(I: MonomialIdeal, q: int) -> MonomialIdeal:
    """J_q = {b : floor(b / q) in staircase(I)} on K[[x_1..x_d]].

    With a perfect residue field the monomials x^c, 0 <= c < q, form a basis
    of F^e_* R, so phi(x^b) ranges over the monomials x^floor(b/q); J_q is
    therefore generated by {q t}.
    """
    if not I.ring.regular:
        raise ValueError("Cartier contraction is implemented on regular rings only")
    _check_power_of_p(q, I.ring.p)
    gens = [tuple(q * x for x in t) for t in I.generators]
    return MonomialIdeal(I.ring, SemigroupIdeal(I.ring.semigroup, gens, minimal=True))


def e_hk(I: MonomialIdeal, mode: str = "exact", e_max: int = 3, *, cache=None):
    """Hilbert-Kunz multiplicity.

    exact: the volume of the continuous staircase complement (regular rings),
    computed by inclusion-exclusion over joins, or a box sweep when the
    generator count exceeds the inclusion-exclusion cap.
    counting: report of ell(R/I^[q]) / q^d for q = p^0 .. p^e_max.
    """
    if mode == "exact":
        if not I.ring.regular:
            raise ValueError("exact e_HK is available on regular rings only")
        b = _axis_bounds(I)
        return staircase.staircase_volume(I.generators, b)
    if mode == "counting":
        p, d = I.ring.p, I.ring.dim
        seq = []
        for e in range(e_max + 1):
            q = p ** e
            seq.append((e, q, Fraction(colength(frobenius_power(I, q), cache), q ** d)))
        return ConvergenceReport.from_sequence(f"e_hk{list(I.generators)}", seq)
    raise ValueError(f"unknown mode {mode!r}")


class PFamily:
    """A rule e -> I_{p^e} with cached terms."""

    def __init__(self, ring: ToricRing, rule: Callable[[int], MonomialIdeal], kind: str = "custom",
                 label: str = "", base: MonomialIdeal | None = None):
        self.ring = ring
        self.rule = rule
        self.kind = kind
        self.label = label or kind
        self.base = base
        self.validated_up_to = -1
        self._cache: dict[int, MonomialIdeal] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"PFamily({self.label}, p={self.ring.p})"

    def q(self, e: int) -> int:
        return self.ring.p ** e

    def ideal(self, e: int) -> MonomialIdeal:
        hit = self._cache.get(e)
        if hit is None:
            I = self.rule(e)
            if not isinstance(I, MonomialIdeal):
                I = self.ring.ideal(I)
            with self._lock:
                hit = self._cache.setdefault(e, I)
        return hit

    def system(self) -> PSystem:
        """The p-system e -> staircase(I_{p^e}) in S."""
        return PSystem(self.ring.semigroup, self.ring.p, lambda e: self.ideal(e).staircase, name=self.label)

    def validate(self, e_max: int) -> ValidationReport:
        """Check I_q^[p] ⊆ I_pq on generators for every q = p^e, e < e_max."""
        p = self.ring.p
        for e in range(e_max):
            frob = frobenius_power(self.ideal(e), p)
            nxt = self.ideal(e + 1).staircase
            gens = frob.staircase.array
            if not len(gens):
                continue
            ok = nxt.contains_many(gens)
            if not ok.all():
                w = tuple(int(x) for x in gens[int(np.flatnonzero(~ok)[0])])
                return ValidationReport(False, e_max, Violation(e, tuple(x // p for x in w), w))
        self.validated_up_to = max(self.validated_up_to, e_max)
        return ValidationReport(True, e_max)


def _power_rule(base: MonomialIdeal, exponent: Callable[[int], int]) -> Callable[[int], MonomialIdeal]:
    return lambda e: ordinary_power(base, exponent(base.ring.p ** e))


def make_family(kind: str, base: MonomialIdeal | None = None, *, t=None, rule=None,
                validate_to: int = 4, validate: bool = True, label: str = "") -> PFamily:
    """Build a p-family.

    kinds: frobenius (I_q = base^[q]), power (I_q = base^ceil(t q)),
    cartier (Cartier contractions of base, regular rings), custom (rule(q)
    returns a MonomialIdeal or a generator list; base only supplies the ring).
    """
    if kind == "custom":
        if rule is None or base is None:
            raise ValueError("custom families need a rule and a base ideal (for the ring)")
        ring = base.ring
        fam = PFamily(ring, lambda e: rule(ring.p ** e), "custom", label or "custom", base)
    elif base is None:
        raise ValueError(f"{kind} family needs a base ideal")
    elif kind == "frobenius":
        fam = PFamily(base.ring, lambda e: frobenius_power(base, base.ring.p ** e), kind,
                      label or f"frobenius{list(base.generators)}", base)
    elif kind == "power":
        t = Fraction(t if t is not None else 1)
        if t <= 0:
            raise ValueError("power family needs t > 0")
        fam = PFamily(base.ring, _power_rule(base, lambda q: math.ceil(t * q)), kind,
                      label or f"power{list(base.generators)},{t}", base)
    elif kind == "cartier":
        if not base.ring.regular:
            raise ValueError("Cartier families are implemented on regular rings only")
        fam = PFamily(base.ring, lambda e: cartier_contraction(base, base.ring.p ** e), kind,
                      label or f"cartier{list(base.generators)}", base)
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    if validate and validate_to > 0:
        rep = fam.validate(validate_to)
        if not rep.ok:
            raise FamilyAxiomError(rep)
    return fam


def scaled_power_family(base: MonomialIdeal, t, k: int = 1, **kw) -> PFamily:
    """Custom family I_q = base^ceil(t q^k); a p-family only for k <= 1."""
    t = Fraction(t)
    return make_family("custom", base, rule=_q_rule(_power_rule(base, lambda q: math.ceil(t * q ** k)), base.ring.p),
                       label=kw.pop("label", f"custom{list(base.generators)},{t},{k}"), **kw)


def _q_rule(e_rule, p):
    def by_q(q):
        e = 0
        while p ** e < q:
            e += 1
        return e_rule(e)
    return by_q


def corner_family(ring: ToricRing, corners: Sequence[Sequence], **kw) -> PFamily:
    """Custom family I_q generated by the monomials x^ceil(q v), v in corners."""
    corners = [tuple(Fraction(x) for x in v) for v in corners]

    def rule(q):
        return ring.ideal([tuple(math.ceil(q * x) for x in v) for v in corners])

    label = kw.pop("label", "corners" + str([tuple(str(x) for x in v) for v in corners]))
    return make_family("custom", ring.unit_ideal(), rule=rule, label=label, **kw)


def find_c(F: PFamily, e_max: int) -> int:
    """Least c >= 1 with every S-point of normalized degree >= c q inside I_q, e <= e_max."""
    c = 1
    for e in range(e_max + 1):
        q = F.q(e)
        gap = deepest_gap(F.ideal(e))
        if gap is not None:
            c = max(c, math.floor(gap[1] / q) + 1)
    return c
