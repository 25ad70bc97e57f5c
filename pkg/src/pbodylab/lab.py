"""Experiment drivers: length and Hilbert-Kunz sequences of p-families, the
three-way volume/multiplicity comparison, and the Frobenius growth bound."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cones import TruncatingHalfspace
from .pbody import DEFAULT_SAMPLES, PBody, cone_volume, count_scaled, pbody_truncated_volume
from .reports import FAIL, FIT_POINTS, PASS, ConvergenceReport, affine_fit
from .semigroups import SemigroupIdeal
from .toric import MonomialIdeal, PFamily, colength, e_hk, find_c, frobenius_power

INNER_CAP = 6
INNER_BUDGET = 1 << 20


def _map(fn, items, workers):
    items = list(items)
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def auto_halfspace(F: PFamily, e_max: int) -> TruncatingHalfspace:
    """H = {(a, u) < alpha} with alpha just above c * max(a).

    c comes from find_c, so every S-point outside qH lies in I_q. The offset
    1/(L (2p + 1)) keeps q alpha off the lattice values (a, u) in (1/L) Z, since
    q = p^e is prime to 2p + 1.
    """
    ring = F.ring
    c = find_c(F, e_max)
    alpha = c * max(ring.a.weights) + Fraction(1, ring.a.common_denominator * (2 * ring.p + 1))
    return TruncatingHalfspace(ring.a, alpha)


def length_sequence(F: PFamily, e_range: Sequence[int], *, cache=None, workers: int = 1) -> ConvergenceReport:
    """colength(I_q) / q^d over e_range."""
    d = F.ring.dim
    es = list(e_range)
    vals = _map(lambda e: Fraction(colength(F.ideal(e), cache), F.q(e) ** d), es, workers)
    return ConvergenceReport.from_sequence("length", [(e, F.q(e), v) for e, v in zip(es, vals)])


def singular_hk(I: MonomialIdeal, cap: int = INNER_CAP, *, budget: int = INNER_BUDGET,
                cache=None) -> tuple[Fraction, int, bool]:
    """e_HK(I) from colength(I^[Q]) / Q^d, Q = p^k.

    Stops at the first exact repeat (returned as exact), or once k reaches cap
    or the complement to enumerate, about colength(I) Q^d points, would pass
    budget; then the 1/Q extrapolation of the last values is returned instead.
    """
    p, d = I.ring.p, I.ring.dim
    pts = []
    n0 = colength(I, cache)
    for k in range(cap + 1):
        Q = p ** k
        if k and n0 * Q ** d > budget:
            break
        v = Fraction(colength(frobenius_power(I, Q), cache), Q ** d)
        if pts and v == pts[-1][1]:
            return v, k, True
        pts.append((Q, v))
    if len(pts) == 1:
        return pts[0][1], 0, False
    return affine_fit(pts[-FIT_POINTS:])[0], len(pts) - 1, False


def hk_sequence(F: PFamily, e_range: Sequence[int], mode: str = "auto", *, inner_cap: int = INNER_CAP,
                cache=None, workers: int = 1) -> ConvergenceReport:
    """e_HK(I_q) / q^d over e_range.

    Regular rings use the exact staircase volume; other rings take the inner
    Frobenius limit by counting.
    """
    d = F.ring.dim
    if mode == "auto":
        mode = "exact" if F.ring.regular else "counting"
    es = list(e_range)
    stop = {}

    def one(e):
        I = F.ideal(e)
        if mode == "exact":
            v = e_hk(I, "exact")
        else:
            v, k, exact = singular_hk(I, inner_cap, cache=cache)
            stop[e] = f"{k}{'' if exact else '~'}"
        return v / F.q(e) ** d

    vals = _map(one, es, workers)
    details = {"mode": mode}
    if stop:
        details["inner_levels"] = ",".join(str(stop[e]) for e in es)
    return ConvergenceReport.from_sequence("hk", [(e, F.q(e), v) for e, v in zip(es, vals)], details=details)


def pbody_sequence(F: PFamily, e_range: Sequence[int], H: TruncatingHalfspace, *,
                   samples: int = DEFAULT_SAMPLES, seed: int = 0) -> ConvergenceReport:
    """Vol(C ∩ H) - Vol(level e of the body of the staircases ∩ H).

    With J_q = R the first body is C itself. Exact levels are tabulated over
    e_range; a Monte Carlo volume is only taken at the last level.
    """
    S = F.ring.semigroup
    body = PBody(F.system())
    full = cone_volume(S, H)
    es = list(e_range)
    if not S.cone.is_orthant:
        es = es[-1:]
    seq, se = [], None
    for e in es:
        v = pbody_truncated_volume(body, H, e, samples, seed)
        seq.append((e, F.q(e), full - v.value))
        if not v.exact:
            se = v.stderr
    details = {"alpha": str(H.alpha), "cone_volume": str(full)}
    return ConvergenceReport.from_sequence("pbody", seq, stderr=se, details=details)


@dataclass
class VolMultResult:
    length: ConvergenceReport
    hk: ConvergenceReport
    pbody: ConvergenceReport
    halfspace: TruncatingHalfspace
    tol: Fraction
    disagreement: Fraction
    verdict: str
    keystone: list[tuple[int, int, int, int]] = field(default_factory=list)

    @property
    def reports(self) -> list[ConvergenceReport]:
        return [self.length, self.hk, self.pbody]


def _estimate(rep: ConvergenceReport) -> Fraction:
    return rep.extrapolated_limit if len(rep.sequence) > 1 else rep.last_value


def vol_mult_check(F: PFamily, e_max: int, tol=Fraction(1, 1000), *, e_min: int = 0,
                   samples: int = DEFAULT_SAMPLES, seed: int = 0, cache=None, workers: int = 1,
                   inner_cap: int = INNER_CAP, keystone_to: int | None = None) -> VolMultResult:
    """Length limit vs Hilbert-Kunz limit vs p-body volume difference.

    Passes when the three estimates agree pairwise within tol. Each report is
    also judged against the length limit.
    """
    tol = Fraction(tol)
    es = range(e_min, e_max + 1)
    H = auto_halfspace(F, e_max)
    length = length_sequence(F, es, cache=cache, workers=workers)
    hk = hk_sequence(F, es, inner_cap=inner_cap, cache=cache, workers=workers)
    pb = pbody_sequence(F, es, H, samples=samples, seed=seed)
    est = [_estimate(r) for r in (length, hk, pb)]
    gap = max(abs(x - y) for x in est for y in est)
    target = est[0]
    for r in (length, hk, pb):
        r.judge(target, tol, "either")
    verdict = PASS if gap <= tol and all(r.verdict == PASS for r in (length, hk, pb)) else FAIL
    checks = []
    if keystone_to is not None:
        checks = [keystone_counts(F, H, e, workers=workers) for e in range(min(keystone_to, e_max) + 1)]
        if any(c[1] != c[2] - c[3] for c in checks):
            verdict = FAIL
    return VolMultResult(length, hk, pb, H, tol, gap, verdict, checks)


def keystone_counts(F: PFamily, H: TruncatingHalfspace, e: int, workers: int = 1) -> tuple[int, int, int, int]:
    """(e, colength(I_q), #(S ∩ qH), #(staircase(I_q) ∩ qH)); the last two differ by the first."""
    q = F.q(e)
    S = F.ring.semigroup
    whole = SemigroupIdeal(S, [(0,) * S.dim], minimal=True)
    I = F.ideal(e)
    return (e, colength(I), count_scaled(whole, q, H, workers), count_scaled(I.staircase, q, H, workers))


def growth_bound_check(I: MonomialIdeal, e_range: Sequence[int], *, cache=None) -> ConvergenceReport:
    """Ratios colength(I^[q]) / q^d against a constant bound alpha.

    alpha is colength(I) on regular rings (where the ratio is constant) and
    otherwise the larger of colength(I) and the ratio at e = 1.
    """
    p, d = I.ring.p, I.ring.dim
    es = list(e_range)
    seq = [(e, p ** e, Fraction(colength(frobenius_power(I, p ** e), cache), p ** (e * d))) for e in es]
    alpha = Fraction(colength(I, cache))
    if not I.ring.regular:
        alpha = max(alpha, Fraction(colength(frobenius_power(I, p), cache), p ** d))
    rep = ConvergenceReport.from_sequence("growth", seq, target=alpha, tol=0, criterion="last")
    rep.verdict = PASS if all(v <= alpha for _, _, v in seq) else FAIL
    rep.details["alpha"] = str(alpha)
    rep.details["max_ratio"] = str(max(v for _, _, v in seq))
    return rep
