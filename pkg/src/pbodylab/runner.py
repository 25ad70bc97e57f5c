"""Turning a parsed experiment file into models and reports."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cones import TruncatingHalfspace
from .dsl import ExperimentDecl, ExperimentSpec, FamilyDecl
from .emit import emit_report
from .lab import auto_halfspace, vol_mult_check
from .pbody import DEFAULT_SAMPLES, fujita_check, limit_check
from .reports import FAIL, PASS, ConvergenceReport
from .toric import (
    MonomialIdeal,
    PFamily,
    ToricRing,
    corner_family,
    make_family,
    scaled_power_family,
)

DEFAULT_E_MAX = 8
VALIDATE_LEVELS = 4


@dataclass
class Model:
    spec: ExperimentSpec
    ring: ToricRing
    ideals: dict[str, MonomialIdeal]

    def family(self, name: str, validate_to: int = VALIDATE_LEVELS, validate: bool = True) -> PFamily:
        return build_family(self, self.spec.family(name), validate_to, validate)


def build_model(spec: ExperimentSpec) -> Model:
    r = spec.ring
    if r.generators is None:
        ring = ToricRing.power_series(r.d, r.p, r.a)
    else:
        ring = ToricRing.affine(r.generators, r.p, r.a)
    ideals = {"m": ring.maximal_ideal()}
    for decl in spec.ideals:
        ideals[decl.name] = ring.ideal(decl.generators)
    return Model(spec, ring, ideals)


def build_family(model: Model, decl: FamilyDecl, validate_to: int = VALIDATE_LEVELS,
                 validate: bool = True) -> PFamily:
    kw = dict(validate_to=validate_to, validate=validate, label=decl.name)
    if decl.corners is not None:
        return corner_family(model.ring, decl.corners, **kw)
    base = model.ideals[decl.base]
    if decl.kind == "custom":
        return scaled_power_family(base, decl.t, decl.k, **kw)
    return make_family(decl.kind, base, t=decl.t, **kw)


def _run_one(model: Model, x: ExperimentDecl, *, threads: int, seed: int | None, cache) -> list[ConvergenceReport]:
    e_min = x.get("e_min", 0)
    e_max = x.get("e_max", DEFAULT_E_MAX)
    seed = x.get("seed", 0) if seed is None else seed
    samples = x.get("samples", DEFAULT_SAMPLES)
    prefix = f"{x.family}:{x.kind}"
    if x.kind == "validate":
        F = model.family(x.family, validate=False)
        rep = F.validate(max(1, e_max))
        out = ConvergenceReport(prefix + ":axiom", [])
        out.verdict = PASS if rep.ok else FAIL
        out.details = {"e_max": str(rep.e_max), "message": rep.describe()}
        if rep.violation is not None:
            v = rep.violation
            out.details.update(e=str(v.e), generator=str(v.generator), witness=str(v.witness))
        return [out]
    F = model.family(x.family, validate_to=e_max)
    ring = model.ring
    if x.get("alpha") is not None:
        H = TruncatingHalfspace(ring.a, x.get("alpha"))
    else:
        H = auto_halfspace(F, e_max)
    if x.kind == "volmult":
        default_tol = Fraction(1, 1000) if ring.semigroup.cone.is_orthant else Fraction(1, 100)
        res = vol_mult_check(F, e_max, x.get("tol", default_tol), e_min=e_min, samples=samples, seed=seed,
                             cache=cache, workers=threads)
        for r in res.reports:
            r.label = f"{prefix}:{r.label}"
            r.details["overall"] = res.verdict
            r.details["disagreement"] = str(res.disagreement)
        return res.reports
    if x.kind == "limit317":
        rep = limit_check(F.system(), H, range(e_min, e_max + 1), tol=x.get("tol", Fraction(2, 1000)),
                          samples=samples, seed=seed, workers=threads)
        rep.label = prefix + ":count"
        rep.details["alpha"] = str(H.alpha)
        return [rep]
    if x.kind == "fujita":
        res = fujita_check(F.system(), H, x.get("epsilon", Fraction(1, 20)), x.get("e_inner", 4), e_max,
                           workers=threads)
        rep = res.to_report(prefix + ":inner")
        rep.details["alpha"] = str(H.alpha)
        return [rep]
    raise ValueError(f"unknown experiment kind {x.kind!r}")


def stem_for(index: int, x: ExperimentDecl) -> str:
    return x.get("output") or f"{index:02d}_{x.kind}_{x.family}"


def run_experiment(spec: ExperimentSpec, *, out_dir=None, fmt: str = "json", threads: int = 1,
                   seed: int | None = None, cache=None) -> list[ConvergenceReport]:
    """Run every experiment of the spec in order; write files when out_dir is given."""
    model = build_model(spec)
    reports = []
    for i, x in enumerate(spec.experiments):
        reps = _run_one(model, x, threads=threads, seed=seed, cache=cache)
        if out_dir is not None:
            emit_report(reps, fmt, Path(out_dir), stem_for(i, x))
        reports.extend(reps)
    return reports
