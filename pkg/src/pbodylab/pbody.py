"""p-bodies of p-systems: membership, scaled lattice counts, truncated volumes.

For a p-system T, level e of the body is (1/q) T_q + C with q = p^e and
C = Cone(S); the body itself is the ascending union over e.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import staircase
from .cones import TruncatingHalfspace, truncated_cone_volume, truncation_bounding_box
from .lattice import box_array, split_range
from .reports import ConvergenceReport, FIT_POINTS, affine_fit
from .semigroups import PSystem, SemigroupIdeal, StandardSemigroup

DEFAULT_SAMPLES = 10 ** 5
_BIG = np.iinfo(np.int64).max // 4


class PBody:
    def __init__(self, system: PSystem):
        self.system = system
        self.parent: StandardSemigroup = system.parent
        self.cone = self.parent.cone
        self.p = system.p

    def __repr__(self):
        return f"PBody({self.system!r})"

    def level(self, e: int) -> tuple[int, tuple]:
        """(q, generators of T_q); level e of the body is {t/q} + C."""
        return self.system.q(e), self.system.ideal(e).generators

    def corners(self, e: int) -> list[tuple[Fraction, ...]]:
        q, gens = self.level(e)
        return [tuple(Fraction(x, q) for x in t) for t in gens]

    def contains(self, e: int, x: Sequence) -> bool:
        return delta_q_membership(self, e, x)

    def nested(self, e1: int, e2: int) -> bool:
        """Every corner t/q1 of level e1 lies in level e2."""
        return all(delta_q_membership(self, e2, c) for c in self.corners(e1))


def delta_q_membership(body: PBody, e: int, x: Sequence) -> bool:
    q, gens = body.level(e)
    qx = [Fraction(v) * q for v in x]
    cone = body.cone
    return any(cone.contains([a - b for a, b in zip(qx, t)]) for t in gens)


def _int_bound(H: TruncatingHalfspace, q: int) -> tuple[np.ndarray, int]:
    """Integer weights w and K with (a, u) < q alpha  <=>  (w, u) <= K."""
    L = H.a.common_denominator
    w = np.array(H.a.integer_weights(), dtype=np.int64)
    return w, math.ceil(q * H.alpha * L) - 1


def _count_orthant(T: SemigroupIdeal, q: int, H: TruncatingHalfspace, workers: int) -> int:
    w, K = _int_bound(H, q)
    if K < 0:
        return 0
    d = len(w)
    if d == 1:
        M = staircase.column_thresholds(T.array, (), _BIG)
        return max(0, K // int(w[0]) - int(M) + 1)
    hi = [K // int(x) + 1 for x in w[:-1]]
    M = staircase.column_thresholds(T.array, hi, _BIG)

    def slab(bounds):
        x0, x1 = bounds
        block = M[x0:x1]
        grids = np.meshgrid(np.arange(x0, x1), *[np.arange(h) for h in hi[1:]], indexing="ij")
        rem = K - sum(int(w[i]) * g for i, g in enumerate(grids))
        top = np.where(rem >= 0, rem // int(w[-1]), -1)
        return int(np.maximum(top - block + 1, 0).sum(dtype=np.int64))

    return _reduce(slab, split_range(0, hi[0], max(1, workers)), workers)


def _reduce(fn, parts, workers) -> int:
    if workers <= 1 or len(parts) <= 1:
        return sum(fn(b) for b in parts)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return sum(ex.map(fn, parts))  # map keeps order, and integer sums are exact anyway


def _count_general(T: SemigroupIdeal, q: int, H: TruncatingHalfspace, workers: int) -> int:
    S = T.parent
    w, K = _int_bound(H, q)
    lo, hi = truncation_bounding_box(S.cone, H.scaled(q))
    lo = [math.floor(x) for x in lo]
    hi = [math.floor(x) + 1 for x in hi]
    d = S.dim
    rest = box_array(lo[1:], hi[1:]) if d > 1 else np.empty((1, 0), dtype=np.int64)

    def slab(bounds):
        n = 0
        for x0 in range(*bounds):
            pts = np.concatenate([np.full((len(rest), 1), x0, dtype=np.int64), rest], axis=1)
            pts = pts[pts @ w <= K]
            pts = pts[S.contains_many(pts)]
            n += int(T.contains_many(pts).sum())
        return n

    return _reduce(slab, split_range(lo[0], hi[0], max(1, workers)), workers)


def count_scaled(T: SemigroupIdeal, q: int, H: TruncatingHalfspace, workers: int = 1) -> int:
    """#(T ∩ qH): points u of T with (a, u) < q alpha."""
    H.check_truncates(T.parent.cone)
    if q < 1:
        raise ValueError("q must be >= 1")
    if T.parent.is_regular:
        return _count_orthant(T, q, H, workers)
    return _count_general(T, q, H, workers)


@dataclass(frozen=True)
class VolumeEstimate:
    value: Fraction
    stderr: float = 0.0
    exact: bool = True
    samples: int = 0

    def __float__(self):
        return float(self.value)


def stratified_volume(indicator, lo: Sequence[float], hi: Sequence[float], samples: int = DEFAULT_SAMPLES,
                      seed: int = 0) -> tuple[float, float]:
    """Volume of {x in box : indicator(x)} by jittered stratified sampling.

    The box is cut into a grid of cells with two uniform samples per cell; the
    within-cell disagreement of the pair gives the standard error.
    """
    d = len(lo)
    lo = np.asarray(lo, dtype=float)
    span = np.asarray(hi, dtype=float) - lo
    k = max(1, int((samples / 2) ** (1.0 / d)))
    cells = np.stack(np.meshgrid(*[np.arange(k)] * d, indexing="ij"), axis=-1).reshape(-1, d)
    rng = np.random.default_rng(seed)
    f = []
    for _ in range(2):
        X = lo + (cells + rng.random(cells.shape)) / k * span
        f.append(indicator(X).astype(float))
    cell_vol = float(np.prod(span)) / len(cells)
    est = cell_vol * float(((f[0] + f[1]) / 2).sum())
    var = cell_vol ** 2 * float(((f[0] - f[1]) ** 2 / 4).sum())
    return est, math.sqrt(var)


def _level_indicator(body: PBody, e: int, H: TruncatingHalfspace):
    q, gens = body.level(e)
    N = np.array(body.cone.facets, dtype=float)
    shifts = np.array(gens, dtype=float) @ N.T / q  # facet values of the corners
    a = np.array([float(x) for x in H.a.weights])
    alpha = float(H.alpha)

    def ind(X):
        vals = X @ N.T
        hit = np.zeros(len(X), dtype=bool)
        for s in shifts:
            hit |= np.all(vals >= s, axis=1)
        return hit & (X @ a < alpha)

    return ind


def pbody_truncated_volume(body: PBody, H: TruncatingHalfspace, e_cap: int,
                           samples: int = DEFAULT_SAMPLES, seed: int = 0) -> VolumeEstimate:
    """Vol(level e_cap of the body, cut by H).

    Exact when C is the non-negative orthant (inclusion-exclusion over joins,
    or a disjoint box sweep for many corners); seeded Monte Carlo otherwise.
    """
    H.check_truncates(body.cone)
    if body.cone.is_orthant:
        v = staircase.union_volume_below(body.corners(e_cap), H.a.weights, H.alpha)
        return VolumeEstimate(v)
    lo, hi = truncation_bounding_box(body.cone, H)
    est, se = stratified_volume(_level_indicator(body, e_cap, H), [float(x) for x in lo],
                                [float(x) for x in hi], samples, seed)
    return VolumeEstimate(Fraction(est), se, exact=False, samples=samples)


def limit_check(system: PSystem, H: TruncatingHalfspace, e_range: Sequence[int], *, tol=Fraction(2, 1000),
                samples: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                criterion: str = "either") -> ConvergenceReport:
    """#(T_q ∩ qH)/q^d over e_range against the truncated body volume at the largest e."""
    es = list(e_range)
    d = system.parent.dim
    seq = []
    for e in es:
        q = system.q(e)
        seq.append((e, q, Fraction(count_scaled(system.ideal(e), q, H, workers), q ** d)))
    body = PBody(system)
    vol = pbody_truncated_volume(body, H, es[-1], samples, seed)
    details = {"volume_level": str(es[-1]), "volume_exact": str(vol.exact)}
    if vol.exact and len(es) >= 2:
        tail = [(system.q(e), pbody_truncated_volume(body, H, e).value) for e in es[-FIT_POINTS:]]
        details["volume_extrapolated"] = str(affine_fit(tail)[0])
    return ConvergenceReport.from_sequence(
        f"count/{system.name or 'system'}", seq, target=vol.value, tol=tol, criterion=criterion,
        stderr=None if vol.exact else vol.stderr, details=details)


@dataclass
class FujitaRow:
    e: int
    q: int
    inner: Fraction
    exact: bool
    ok: bool


@dataclass
class FujitaResult:
    q0: int | None
    target: Fraction
    epsilon: Fraction
    table: list[FujitaRow] = field(default_factory=list)

    def to_report(self, label: str = "fujita") -> ConvergenceReport:
        rep = ConvergenceReport.from_sequence(label, [(r.e, r.q, r.inner) for r in self.table],
                                              target=self.target, tol=self.epsilon, criterion="last")
        rep.details["q0"] = str(self.q0)
        rep.details["epsilon"] = str(self.epsilon)
        if self.q0 is None:
            rep.verdict = "fail"
        return rep


def _inner_limit(system: PSystem, e: int, H: TruncatingHalfspace, e_inner: int, workers: int) -> tuple[Fraction, bool]:
    """lim over k of #((p^k T_q + S) ∩ p^k q H) / (p^k q)^d, with q = p^e."""
    S = system.parent
    if S.cone.is_orthant:
        corners = [tuple(Fraction(x, system.q(e)) for x in t) for t in system.ideal(e).generators]
        return staircase.union_volume_below(corners, H.a.weights, H.alpha), True
    Q = system.q(e) * system.p ** e_inner
    T = system.ideal(e).scaled(system.p ** e_inner)
    return Fraction(count_scaled(T, Q, H, workers), Q ** S.dim), False


def fujita_check(system: PSystem, H: TruncatingHalfspace, epsilon, e_inner: int = 4, e_max: int = 8, *,
                 target=None, workers: int = 1) -> FujitaResult:
    """Least q0 = p^e with inner limit >= Vol(body ∩ H) - epsilon for every tested q >= q0.

    The body volume is `target` when supplied; otherwise the affine 1/q
    extrapolation of the level volumes, never below the last level (the
    levels increase to the body).
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    H.check_truncates(system.parent.cone)
    rows = []
    for e in range(e_max + 1):
        v, exact = _inner_limit(system, e, H, e_inner, workers)
        rows.append((e, system.q(e), v, exact))
    if target is None:
        fit = affine_fit([(q, v) for _, q, v, _ in rows[-FIT_POINTS:]])[0]
        target = max(fit, rows[-1][2])
    target = Fraction(target)
    table = [FujitaRow(e, q, v, exact, v >= target - epsilon) for e, q, v, exact in rows]
    q0 = None
    for row in reversed(table):
        if not row.ok:
            break
        q0 = row.q
    return FujitaResult(q0, target, epsilon, table)


def cone_volume(S: StandardSemigroup, H: TruncatingHalfspace) -> Fraction:
    return truncated_cone_volume(S.cone, H)
