"""The eight acceptance criteria, each at its stated tolerance and time limit.

Every test records a one-line verdict that is printed in the terminal summary
(and directly when this file is run as a script).
"""

import math
import random
import string
import time
from fractions import Fraction

import oracles
from conftest import ACCEPTANCE
from pbodylab.cones import TruncatingHalfspace
from pbodylab.dsl import (
    ExperimentDecl,
    ExperimentSpec,
    FamilyDecl,
    IdealDecl,
    RingDecl,
    SpecError,
    format_spec,
    parse_spec,
)
from pbodylab.lab import vol_mult_check
from pbodylab.lattice import WeightVector
from pbodylab.pbody import PBody, count_scaled, fujita_check, limit_check, pbody_truncated_volume
from pbodylab.semigroups import (
    SemigroupIdeal,
    corner_system,
    degree_system,
    frobenius_system,
    full_system,
    make_standard_semigroup,
    regular_semigroup,
    validate_p_system,
)
from pbodylab.toric import (
    FamilyAxiomError,
    ToricRing,
    colength,
    corner_family,
    e_hk,
    frobenius_power,
    make_family,
    scaled_power_family,
)

A1 = [(1, 0), (1, 1), (1, 2)]


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def seeded_ideals(count: int, seed: int, max_gens: int = 5):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        d = rng.randint(1, 3)
        out.append((d, oracles.random_m_primary(rng, d, rng.randint(d, max_gens))))
    return out


def test_criterion_1_colength_oracle():
    t0 = time.perf_counter()
    bad = []
    for d, gens in seeded_ideals(200, seed=1):
        R = ToricRing.power_series(d, 2)
        if colength(R.ideal(gens)) != oracles.orthant_colength(gens, d):
            bad.append(gens)
    dt = time.perf_counter() - t0
    record(1, not bad and dt < 10, f"200 ideals, {len(bad)} mismatches, {dt:.2f}s (limit 10s)")


def test_criterion_2_frobenius_identity():
    bad = []
    for d, gens in seeded_ideals(50, seed=2):
        R = ToricRing.power_series(d, 2)
        I = R.ideal(gens)
        n = colength(I)
        for q in (2, 4, 8):
            if colength(frobenius_power(I, q)) != n * q ** d:
                bad.append((gens, q))
    record(2, not bad, f"50 ideals x q in {{2,4,8}}, {len(bad)} violations")


def test_criterion_3_hk_paths():
    t0 = time.perf_counter()
    bad = []
    for d, gens in seeded_ideals(50, seed=2):
        I = ToricRing.power_series(d, 2).ideal(gens)
        exact = e_hk(I, "exact")
        if any(v != exact for v in e_hk(I, "counting", 3).values):
            bad.append(gens)
    A = ToricRing.affine(A1, 2, (1, 1))
    vals = e_hk(A.maximal_ideal(), "counting", 8).values[1:]
    worst = max(abs(v - Fraction(3, 2)) for v in vals)
    # slice-enumeration oracle on the levels it can afford
    oracle_ok = all(oracles.a1_colength_frobenius_m(2 ** e) == vals[e - 1] * 4 ** e for e in range(1, 5))
    dt = time.perf_counter() - t0
    ok = not bad and worst <= Fraction(1, 10 ** 12) and oracle_ok and dt < 30
    record(3, ok, f"{len(bad)} exact/counting mismatches; quadric cone max |v - 3/2| = {float(worst):.1e} "
                  f"over e=1..8, oracle {'agrees' if oracle_ok else 'DISAGREES'}; {dt:.2f}s (limit 30s)")


def test_criterion_4_counting_limit():
    t0 = time.perf_counter()
    N2 = regular_semigroup(2)
    H = TruncatingHalfspace(WeightVector.of(1, 1), 2)
    rep = limit_check(degree_system(N2, 2), H, range(11))
    per_level = all(v == Fraction(3, 2) + Fraction(1, 2 * q) for _, q, v in rep.sequence)
    body_volume = Fraction(rep.details["volume_extrapolated"])
    err = abs(rep.extrapolated_limit - body_volume)
    dt = time.perf_counter() - t0
    ok = per_level and body_volume == Fraction(3, 2) and err <= Fraction(2, 1000) and rep.verdict == "pass" and dt < 20
    record(4, ok, f"per-level closed form {'holds' if per_level else 'FAILS'}; limit {rep.extrapolated_limit}, "
                  f"body volume {body_volume}, |error| {float(err):.1e} at q=2^10; {dt:.2f}s (limit 20s)")


def test_criterion_5_fujita():
    N2 = regular_semigroup(2)
    H = TruncatingHalfspace(WeightVector.of(1, 1), 2)
    T = corner_system(N2, 2, [(Fraction(1, 3), 0), (0, Fraction(1, 2))])
    res = fujita_check(T, H, Fraction(1, 20), e_max=10)
    formula = all(r.inner == 2 - Fraction(math.ceil(Fraction(r.q, 3)), r.q) * Fraction(math.ceil(Fraction(r.q, 2)), r.q)
                  for r in res.table)
    record(5, res.q0 == 8 and formula, f"q0 = {res.q0}; inner volumes match 2 - ceil(q/3)ceil(q/2)/q^2 "
                                       f"{'exactly' if formula else 'NOT'} for q = 1..1024")


def test_criterion_6_volume_equals_multiplicity():
    t0 = time.perf_counter()
    R2 = ToricRing.power_series(2, 2)
    a = vol_mult_check(make_family("power", R2.maximal_ideal(), t=1), 12, Fraction(1, 1000))
    a_ok = all(abs(r.extrapolated_limit - Fraction(1, 2)) <= Fraction(1, 1000) for r in a.reports)
    b = vol_mult_check(make_family("frobenius", R2.ideal([(2, 0), (0, 3)])), 8, 0)
    b_ok = all(v == 6 for r in b.reports for v in r.values)
    A = ToricRing.affine(A1, 2, (1, 1))
    c = vol_mult_check(make_family("frobenius", A.maximal_ideal()), 8, Fraction(1, 100), samples=10 ** 5, seed=0)
    c_est = [r.extrapolated_limit if len(r.sequence) > 1 else r.last_value for r in c.reports]
    c_ok = all(abs(x - Fraction(3, 2)) <= Fraction(1, 100) for x in c_est)
    dt = time.perf_counter() - t0
    ok = a_ok and b_ok and c_ok and a.verdict == b.verdict == c.verdict == "pass" and dt < 120
    record(6, ok, f"(a) {[float(r.extrapolated_limit) for r in a.reports]} vs 1/2; (b) all 6: {b_ok}; "
                  f"(c) {[round(float(x), 5) for x in c_est]} vs 3/2 (MC stderr {c.pbody.stderr:.1e}); "
                  f"{dt:.1f}s (limit 120s)")


def test_criterion_7_validators():
    R2 = ToricRing.power_series(2, 2)
    R3 = ToricRing.power_series(3, 3)
    A = ToricRing.affine(A1, 2, (1, 1))
    m = R2.maximal_ideal()
    accepted = []
    for build in [lambda: make_family("frobenius", m, validate_to=6),
                  lambda: make_family("power", m, t=1, validate_to=6),
                  lambda: make_family("power", m, t=Fraction(1, 2), validate_to=6),
                  lambda: make_family("cartier", R2.ideal([(2, 0), (0, 3)]), validate_to=6),
                  lambda: make_family("frobenius", R2.ideal([(2, 0), (0, 3)]), validate_to=6),
                  lambda: make_family("frobenius", R3.maximal_ideal(), validate_to=3),
                  lambda: make_family("frobenius", A.maximal_ideal(), validate_to=5),
                  lambda: corner_family(R2, [(Fraction(1, 3), 0), (0, Fraction(1, 2))], validate_to=6)]:
        try:
            F = build()
            accepted.append(validate_p_system(F.system(), 5).ok)
        except FamilyAxiomError:
            accepted.append(False)
    N2 = regular_semigroup(2)
    As = make_standard_semigroup(A1)
    systems = [degree_system(N2, 2), frobenius_system(SemigroupIdeal(N2, [(1, 0), (0, 1)]), 2), full_system(N2, 3),
               corner_system(N2, 2, [(Fraction(1, 3), 0), (0, Fraction(1, 2))]), frobenius_system(SemigroupIdeal(As, A1), 2)]
    accepted += [validate_p_system(T, 6).ok for T in systems]

    def witness_ok(v, nxt):
        return v.witness == tuple(2 * x for x in v.generator) and not nxt.contains(v.witness)

    try:
        scaled_power_family(m, 1, 2)
        fam_rejected, fam_detail = False, "m^(q^2) family accepted"
    except FamilyAxiomError as exc:
        v = exc.report.violation
        nxt = scaled_power_family(m, 1, 2, validate=False).ideal(v.e + 1)
        fam_rejected, fam_detail = witness_ok(v, nxt), f"m^(q^2) rejected at e={v.e}, witness {v.witness}"
    sq = degree_system(N2, 2, lambda q: q * q)
    rep = validate_p_system(sq, 6)
    sys_rejected = not rep.ok and witness_ok(rep.violation, sq.ideal(rep.violation.e + 1))
    ok = all(accepted) and fam_rejected and sys_rejected
    record(7, ok, f"{sum(accepted)}/{len(accepted)} shipped families/systems accepted; {fam_detail}; "
                  f"sum >= q^2 rejected at e={rep.violation.e if rep.violation else None}, "
                  f"witness {rep.violation.witness if rep.violation else None}")


VALID = ("ring d=2 p=2 semigroup (1,0),(1,1),(1,2) a=1,1\nideal I = (2,0),(2,3)\nfamily F = frobenius(I)\n"
         "family G = power(m, 1/2)\nfamily C = custom((1/3,0),(0,1/2))\n"
         'experiment volmult F e_max=8 tol=1/1000 output="x"\nexperiment fujita C epsilon=1/20\n').encode()


def fuzz_inputs(rng: random.Random, n: int):
    alphabet = (string.ascii_letters + string.digits + "()=,/#\" \n-_").encode()
    for i in range(n):
        kind = i % 3
        if kind == 0:
            yield bytes(rng.randrange(256) for _ in range(rng.randint(0, 120)))
        elif kind == 1:
            yield bytes(rng.choice(alphabet) for _ in range(rng.randint(0, 160)))
        else:
            b = bytearray(VALID)
            for _ in range(rng.randint(1, 6)):
                op = rng.randrange(3)
                pos = rng.randrange(len(b) + 1)
                if op == 0 and b:
                    del b[min(pos, len(b) - 1)]
                elif op == 1:
                    b.insert(pos, rng.choice(alphabet + bytes([0xff, 0xc3])))
                elif b:
                    b[min(pos, len(b) - 1)] = rng.randrange(256)
            yield bytes(b)


def random_spec(rng: random.Random) -> ExperimentSpec:
    d = rng.randint(1, 3)
    vec = lambda: tuple(rng.randint(0, 9) for _ in range(d))  # noqa: E731
    rat = lambda: Fraction(rng.randint(1, 60), rng.randint(1, 12))  # noqa: E731
    gens = None if rng.random() < 0.5 else tuple(tuple(v) for v in (vec() for _ in range(rng.randint(1, 4))) if any(v)) or None
    ring = RingDecl(d, rng.choice([2, 3, 5, 7, 11]), gens, None if rng.random() < 0.5 else tuple(rat() for _ in range(d)))
    ideals = tuple(IdealDecl(f"I{i}", tuple(vec() for _ in range(rng.randint(1, 4)))) for i in range(rng.randint(0, 3)))
    names = ["m"] + [i.name for i in ideals]
    fams = []
    for i in range(rng.randint(1, 4)):
        kind = rng.choice(["frobenius", "power", "cartier", "custom", "corners"])
        if kind == "power":
            fams.append(FamilyDecl(f"F{i}", kind, rng.choice(names), rat()))
        elif kind == "custom":
            fams.append(FamilyDecl(f"F{i}", kind, rng.choice(names), rat(), rng.randint(0, 4)))
        elif kind == "corners":
            fams.append(FamilyDecl(f"F{i}", "custom", corners=tuple(
                tuple(Fraction(rng.randint(0, 20), rng.randint(1, 9)) for _ in range(d)) for _ in range(rng.randint(1, 3)))))
        else:
            fams.append(FamilyDecl(f"F{i}", kind, rng.choice(names)))
    exps = []
    for _ in range(rng.randint(0, 3)):
        params = []
        e_min = rng.randint(0, 3)
        if rng.random() < 0.5:
            params.append(("e_min", e_min))
        if rng.random() < 0.5:
            params.append(("e_max", rng.randint(e_min, 12)))
        if rng.random() < 0.5:
            params.append(("alpha", rat()))
        if rng.random() < 0.5:
            params.append(("epsilon", rat()))
        if rng.random() < 0.5:
            params.append(("tol", Fraction(rng.randint(0, 9), rng.randint(1, 1000))))
        if rng.random() < 0.3:
            params.append(("seed", rng.randint(0, 10 ** 6)))
        if rng.random() < 0.3:
            params.append(("output", "out_" + str(rng.randint(0, 99))))
        exps.append(ExperimentDecl(rng.choice(["volmult", "limit317", "fujita", "validate"]),
                                   rng.choice(fams).name, tuple(params)))
    return ExperimentSpec(ring, ideals, tuple(fams), tuple(exps))


def test_criterion_8_parser_robustness():
    rng = random.Random(8)
    crashes, diagnostics = [], 0
    for data in fuzz_inputs(rng, 10 ** 4):
        try:
            parse_spec(data)
        except SpecError as e:
            diagnostics += 1
            if e.line < 1 or e.col < 1:
                crashes.append((data, "bad position"))
        except Exception as e:  # anything else is a crash
            crashes.append((data, repr(e)))
    trips = 0
    for _ in range(10 ** 3):
        spec = random_spec(rng)
        text = format_spec(spec)
        if parse_spec(text) == spec and format_spec(parse_spec(text)) == text:
            trips += 1
    ok = not crashes and trips == 10 ** 3
    record(8, ok, f"10^4 fuzz inputs: {len(crashes)} crashes, {diagnostics} diagnostics; "
                  f"round-trip {trips}/1000")


if __name__ == "__main__":
    import sys
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
