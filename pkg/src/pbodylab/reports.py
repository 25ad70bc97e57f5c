"""Convergence reports: exact sequences, 1/q extrapolation, verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
FIT_POINTS = 3


def affine_fit(points: Sequence[tuple[int, Fraction]]) -> tuple[Fraction, Fraction, Fraction]:
    """Least-squares fit value ~ L + c/q, exact.

    Returns (L, c, residual) where residual is the largest absolute deviation
    of a fitted point.
    """
    pts = [(Fraction(1, q), Fraction(v)) for q, v in points]
    if not pts:
        raise ValueError("nothing to fit")
    if len(pts) == 1:
        return pts[0][1], Fraction(0), Fraction(0)
    n = len(pts)
    sx = sum(x for x, _ in pts)
    sy = sum(y for _, y in pts)
    sxx = sum(x * x for x, _ in pts)
    sxy = sum(x * y for x, y in pts)
    den = n * sxx - sx * sx
    c = (n * sxy - sx * sy) / den
    L = (sy - c * sx) / n
    resid = max(abs(y - L - c * x) for x, y in pts)
    return L, c, resid


def _frac(x) -> Fraction | None:
    return None if x is None else Fraction(x)


@dataclass
class ConvergenceReport:
    label: str
    sequence: list[tuple[int, int, Fraction]]
    extrapolated_limit: Fraction | None = None
    fit_residual: Fraction = Fraction(0)
    comparison_target: Fraction | None = None
    tolerance: Fraction = Fraction(0)
    verdict: str = INCONCLUSIVE
    criterion: str = "either"
    stderr: float | None = None
    details: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_sequence(cls, label: str, sequence: Iterable[tuple[int, int, Fraction]], *,
                      target=None, tol=0, criterion: str = "either", fit_points: int = FIT_POINTS,
                      stderr: float | None = None, details: dict | None = None) -> "ConvergenceReport":
        seq = [(int(e), int(q), Fraction(v)) for e, q, v in sequence]
        limit, resid = None, Fraction(0)
        if seq:
            limit, _, resid = affine_fit([(q, v) for _, q, v in seq[-fit_points:]])
        rep = cls(label, seq, limit, resid, stderr=stderr, details=dict(details or {}))
        rep.judge(target, tol, criterion)
        return rep

    @property
    def last_value(self) -> Fraction | None:
        return self.sequence[-1][2] if self.sequence else None

    @property
    def values(self) -> list[Fraction]:
        return [v for _, _, v in self.sequence]

    def judge(self, target, tol=0, criterion: str = "either") -> str:
        if criterion not in ("either", "limit", "last"):
            raise ValueError(f"unknown criterion {criterion!r}")
        self.comparison_target = _frac(target)
        self.tolerance = Fraction(tol)
        self.criterion = criterion
        if self.comparison_target is None or not self.sequence:
            self.verdict = INCONCLUSIVE
            return self.verdict
        t = self.comparison_target
        ok_last = abs(self.last_value - t) <= self.tolerance
        ok_limit = abs(self.extrapolated_limit - t) <= self.tolerance
        ok = {"either": ok_last or ok_limit, "limit": ok_limit, "last": ok_last}[criterion]
        self.verdict = PASS if ok else FAIL
        return self.verdict

    def to_dict(self) -> dict:
        def rat(x):
            return None if x is None else str(x)

        return {
            "label": self.label,
            "sequence": [{"e": e, "q": q, "value": str(v)} for e, q, v in self.sequence],
            "extrapolated_limit": rat(self.extrapolated_limit),
            "fit_residual": str(self.fit_residual),
            "comparison_target": rat(self.comparison_target),
            "tolerance": str(self.tolerance),
            "verdict": self.verdict,
            "criterion": self.criterion,
            "stderr": self.stderr,
            "details": dict(self.details),
            "series": [[e, float(v)] for e, _, v in self.sequence],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConvergenceReport":
        return cls(
            label=data["label"],
            sequence=[(s["e"], s["q"], Fraction(s["value"])) for s in data["sequence"]],
            extrapolated_limit=_frac(data["extrapolated_limit"]),
            fit_residual=Fraction(data["fit_residual"]),
            comparison_target=_frac(data["comparison_target"]),
            tolerance=Fraction(data["tolerance"]),
            verdict=data["verdict"],
            criterion=data.get("criterion", "either"),
            stderr=data.get("stderr"),
            details=dict(data.get("details", {})),
        )


_RAT = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_OPT_RAT = {"anyOf": [_RAT, {"type": "null"}]}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ConvergenceReport",
    "type": "object",
    "required": ["label", "sequence", "extrapolated_limit", "fit_residual",
                 "comparison_target", "tolerance", "verdict", "series"],
    "properties": {
        "label": {"type": "string"},
        "sequence": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["e", "q", "value"],
                "properties": {"e": {"type": "integer", "minimum": 0},
                               "q": {"type": "integer", "minimum": 1},
                               "value": _RAT},
            },
        },
        "extrapolated_limit": _OPT_RAT,
        "fit_residual": _RAT,
        "comparison_target": _OPT_RAT,
        "tolerance": _RAT,
        "verdict": {"enum": [PASS, FAIL, INCONCLUSIVE]},
        "criterion": {"enum": ["either", "limit", "last"]},
        "stderr": {"anyOf": [{"type": "number"}, {"type": "null"}]},
        "details": {"type": "object", "additionalProperties": {"type": "string"}},
        "series": {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                              "minItems": 2, "maxItems": 2}},
    },
}
