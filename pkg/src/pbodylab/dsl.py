"""A small line-oriented language for experiment files.

    ring d=2 p=2 regular a=1,1
    ring d=2 p=2 semigroup (1,0),(1,1),(1,2) a=1,1
    ideal I = (2,0),(0,3)
    family F = frobenius(I)          # also power(I, 1/2), cartier(I),
                                     # custom(I, t, k), custom((1/3,0),(0,1/2))
    experiment volmult F e_max=8 tol=1/1000

The name `m` is bound to the maximal ideal. Rationals are written num/den.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

MAX_D = 4
MAX_P = 997
MAX_E = 30
MAX_COORD = 10 ** 6
MAX_NUM_LEN = 40

KINDS = ("volmult", "limit317", "fujita", "validate")
CTORS = ("frobenius", "power", "cartier", "custom")

# name -> (type, lo, hi); ints and rationals are bounded inclusively
PARAMS = {
    "e_min": ("int", 0, MAX_E),
    "e_max": ("int", 0, MAX_E),
    "e_inner": ("int", 0, 12),
    "alpha": ("rat+", 0, 10 ** 6),
    "epsilon": ("rat+", 0, 10 ** 3),
    "tol": ("rat", 0, 10 ** 3),
    "seed": ("int", 0, 2 ** 32 - 1),
    "samples": ("int", 100, 10 ** 7),
    "output": ("str", None, None),
}
PARAM_ORDER = tuple(PARAMS)


class SpecError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        text = f"{line}:{col}: {message}"
        if expected:
            text += f" (expected {' | '.join(expected)})"
        super().__init__(text)


Rat = Fraction
Vector = tuple


@dataclass(frozen=True)
class RingDecl:
    d: int
    p: int
    generators: tuple[Vector, ...] | None  # None means the regular ring
    a: tuple[Rat, ...] | None = None


@dataclass(frozen=True)
class IdealDecl:
    name: str
    generators: tuple[Vector, ...]


@dataclass(frozen=True)
class FamilyDecl:
    name: str
    kind: str
    base: str | None = None
    t: Rat | None = None
    k: int | None = None
    corners: tuple[Vector, ...] | None = None


@dataclass(frozen=True)
class ExperimentDecl:
    kind: str
    family: str
    params: tuple[tuple[str, Union[int, Rat, str]], ...] = ()

    def get(self, key, default=None):
        return dict(self.params).get(key, default)


@dataclass(frozen=True)
class ExperimentSpec:
    ring: RingDecl
    ideals: tuple[IdealDecl, ...] = ()
    families: tuple[FamilyDecl, ...] = ()
    experiments: tuple[ExperimentDecl, ...] = field(default_factory=tuple)

    def ideal(self, name: str) -> IdealDecl:
        return next(i for i in self.ideals if i.name == name)

    def family(self, name: str) -> FamilyDecl:
        return next(f for f in self.families if f.name == name)


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>-?[0-9]+(?:/[0-9]+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"[^"\n]*")
  | (?P<punct>[(),=])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise SpecError(f"unexpected character {line[pos]!r}", lineno, pos + 1,
                            ("name", "number", "(", ")", ",", "=", "string"))
        kind = m.lastgroup
        if kind == "num" and len(m.group()) > MAX_NUM_LEN:
            raise SpecError("number literal too long", lineno, pos + 1, (f"at most {MAX_NUM_LEN} characters",))
        if kind not in ("ws", "comment"):
            text = m.group()
            out.append(_Tok("punct" if kind == "punct" else kind, text, pos + 1))
        pos = m.end()
    return out


class _Line:
    def __init__(self, toks: list[_Tok], lineno: int, length: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.end_col = length + 1

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def col(self) -> int:
        t = self.peek()
        return t.col if t else self.end_col

    def fail(self, msg, expected=()):
        raise SpecError(msg, self.lineno, self.col(), expected)

    def take(self, expected: str, what: str | None = None) -> _Tok:
        t = self.peek()
        ok = t is not None and (t.kind == expected if expected in ("name", "num", "str") else t.text == expected)
        if not ok:
            found = "end of line" if t is None else repr(t.text)
            self.fail(f"unexpected {found}", (what or expected,))
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.kind == "punct" and t.text == text:
            self.i += 1
            return True
        return False

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def done(self):
        if not self.at_end():
            self.fail(f"unexpected {self.peek().text!r}", ("end of line",))

    def keyword(self, word: str):
        t = self.peek()
        if t is None or t.kind != "name" or t.text != word:
            self.fail(f"unexpected {'end of line' if t is None else repr(t.text)}", (word,))
        self.i += 1

    def integer(self, what="integer") -> int:
        t = self.take("num", what)
        if "/" in t.text:
            raise SpecError(f"{what} must be an integer, got {t.text}", self.lineno, t.col, (what,))
        return int(t.text)

    def rational(self, what="rational") -> Fraction:
        t = self.take("num", what)
        num, _, den = t.text.partition("/")
        if den and int(den) == 0:
            raise SpecError("zero denominator", self.lineno, t.col, ("num/den with den > 0",))
        return Fraction(int(num), int(den) if den else 1)

    def tuple_(self, d: int, rational: bool) -> tuple:
        start = self.col()
        self.take("(")
        vals = [self.rational() if rational else self.integer()]
        while self.accept(","):
            vals.append(self.rational() if rational else self.integer())
        self.take(")", ")")
        if len(vals) != d:
            raise SpecError(f"tuple has {len(vals)} entries, ring has d={d}", self.lineno, start, (f"{d} entries",))
        if any(abs(v) > MAX_COORD for v in vals):
            raise SpecError(f"coordinate out of range (|x| <= {MAX_COORD})", self.lineno, start)
        return tuple(vals)

    def tuple_list(self, d: int, rational: bool = False) -> tuple:
        out = [self.tuple_(d, rational)]
        while self.accept(","):
            out.append(self.tuple_(d, rational))
        return tuple(out)


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p ** 0.5) + 1))


def _parse_ring(ln: _Line) -> RingDecl:
    ln.keyword("ring")
    ln.keyword("d")
    ln.take("=")
    col = ln.col()
    d = ln.integer("dimension")
    if not 1 <= d <= MAX_D:
        raise SpecError(f"d={d} out of range [1, {MAX_D}]", ln.lineno, col)
    ln.keyword("p")
    ln.take("=")
    col = ln.col()
    p = ln.integer("prime")
    if not (p <= MAX_P and _is_prime(p)):
        raise SpecError(f"p={p} is not a prime <= {MAX_P}", ln.lineno, col)
    t = ln.peek()
    if t is not None and t.text == "regular":
        ln.i += 1
        gens = None
    elif t is not None and t.text == "semigroup":
        ln.i += 1
        gens = ln.tuple_list(d)
    else:
        ln.fail("missing ring kind", ("regular", "semigroup"))
    a = None
    if not ln.at_end():
        ln.keyword("a")
        ln.take("=")
        col = ln.col()
        a = [ln.rational("weight")]
        while ln.accept(","):
            a.append(ln.rational("weight"))
        if len(a) != d:
            raise SpecError(f"a has {len(a)} entries, ring has d={d}", ln.lineno, col, (f"{d} weights",))
        if any(x <= 0 for x in a):
            raise SpecError("weights must be positive", ln.lineno, col)
        a = tuple(a)
    ln.done()
    return RingDecl(d, p, gens, a)


def _new_name(ln: _Line, names: dict) -> str:
    t = ln.take("name", "NAME")
    if t.text in names or t.text in _RESERVED:
        raise SpecError(f"name {t.text!r} already bound", ln.lineno, t.col, ("fresh NAME",))
    return t.text


_RESERVED = {"m", "ring", "ideal", "family", "experiment", "regular", "semigroup", *KINDS, *CTORS}


def _ref(ln: _Line, names: dict, want: str) -> str:
    t = ln.take("name", f"{want} NAME")
    if names.get(t.text) != want:
        known = sorted(k for k, v in names.items() if v == want)
        raise SpecError(f"unknown {want} {t.text!r}", ln.lineno, t.col, tuple(known) or (f"{want} NAME",))
    return t.text


def _parse_family(ln: _Line, ring: RingDecl, names: dict) -> FamilyDecl:
    ln.keyword("family")
    name = _new_name(ln, names)
    ln.take("=")
    t = ln.take("name", "constructor")
    kind = t.text
    if kind not in CTORS:
        raise SpecError(f"unknown constructor {kind!r}", ln.lineno, t.col, CTORS)
    ln.take("(")
    if kind == "custom" and ln.peek() is not None and ln.peek().text == "(":
        corners = ln.tuple_list(ring.d, rational=True)
        if any(x < 0 for v in corners for x in v):
            raise SpecError("corners must be non-negative", ln.lineno, ln.col())
        ln.take(")")
        ln.done()
        return FamilyDecl(name, kind, corners=corners)
    base = _ref(ln, names, "ideal")
    t_val = k_val = None
    if kind in ("power", "custom"):
        ln.take(",")
        col = ln.col()
        t_val = ln.rational("t")
        if t_val <= 0:
            raise SpecError("t must be positive", ln.lineno, col)
    if kind == "custom":
        ln.take(",")
        col = ln.col()
        k_val = ln.integer("k")
        if not 0 <= k_val <= 4:
            raise SpecError("k out of range [0, 4]", ln.lineno, col)
    ln.take(")", ")")
    ln.done()
    return FamilyDecl(name, kind, base, t_val, k_val)


def _parse_experiment(ln: _Line, names: dict) -> ExperimentDecl:
    ln.keyword("experiment")
    t = ln.take("name", "experiment kind")
    if t.text not in KINDS:
        raise SpecError(f"unknown experiment kind {t.text!r}", ln.lineno, t.col, KINDS)
    kind = t.text
    fam = _ref(ln, names, "family")
    params = {}
    while not ln.at_end():
        t = ln.take("name", "parameter")
        if t.text not in PARAMS:
            raise SpecError(f"unknown parameter {t.text!r}", ln.lineno, t.col, PARAM_ORDER)
        if t.text in params:
            raise SpecError(f"parameter {t.text!r} repeated", ln.lineno, t.col)
        ln.take("=")
        typ, lo, hi = PARAMS[t.text]
        col = ln.col()
        if typ == "str":
            s = ln.take("str", "quoted string").text[1:-1]
            if not s or "/" in s or "\\" in s or s.startswith("."):
                raise SpecError("output must be a plain file stem", ln.lineno, col)
            params[t.text] = s
            continue
        v = ln.integer(t.text) if typ == "int" else ln.rational(t.text)
        bad = v < lo or v > hi or (typ == "rat+" and v <= 0)
        if bad:
            raise SpecError(f"{t.text}={v} out of range", ln.lineno, col,
                            (f"{'(' if typ == 'rat+' else '['}{lo}, {hi}]",))
        params[t.text] = v
    e_min, e_max = params.get("e_min", 0), params.get("e_max")
    if e_max is not None and e_min > e_max:
        raise SpecError("e_min exceeds e_max", ln.lineno, 1)
    ordered = tuple((k, params[k]) for k in PARAM_ORDER if k in params)
    return ExperimentDecl(kind, fam, ordered)


def parse_spec(text: Union[str, bytes]) -> ExperimentSpec:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            head = bytes(text)[:exc.start]
            line = head.count(b"\n") + 1
            col = exc.start - (head.rfind(b"\n") + 1) + 1
            raise SpecError("input is not valid UTF-8", line, col) from None
    ring = None
    names: dict[str, str] = {}
    ideals, families, experiments = [], [], []
    for lineno, raw in enumerate(text.split("\n"), 1):
        toks = _tokenize(raw, lineno)
        if not toks:
            continue
        ln = _Line(toks, lineno, len(raw))
        head = toks[0]
        if head.kind != "name" or head.text not in ("ring", "ideal", "family", "experiment"):
            raise SpecError(f"unexpected {head.text!r}", lineno, head.col,
                            ("ring", "ideal", "family", "experiment"))
        if head.text == "ring":
            if ring is not None:
                raise SpecError("second ring block", lineno, head.col)
            ring = _parse_ring(ln)
            names["m"] = "ideal"
            continue
        if ring is None:
            raise SpecError(f"ring block required before {head.text}", lineno, head.col, ("ring",))
        if head.text == "ideal":
            ln.keyword("ideal")
            name = _new_name(ln, names)
            ln.take("=")
            gens = ln.tuple_list(ring.d)
            ln.done()
            ideals.append(IdealDecl(name, gens))
            names[name] = "ideal"
        elif head.text == "family":
            fam = _parse_family(ln, ring, names)
            families.append(fam)
            names[fam.name] = "family"
        else:
            experiments.append(_parse_experiment(ln, names))
    if ring is None:
        raise SpecError("empty spec: ring block required", 1, 1, ("ring",))
    return ExperimentSpec(ring, tuple(ideals), tuple(families), tuple(experiments))


def _fmt_rat(x: Fraction) -> str:
    return str(Fraction(x))


def _fmt_tuples(vs) -> str:
    return ",".join("(" + ",".join(_fmt_rat(x) for x in v) + ")" for v in vs)


def format_spec(spec: ExperimentSpec) -> str:
    """Canonical text form; parse_spec(format_spec(s)) == s."""
    r = spec.ring
    head = f"ring d={r.d} p={r.p} " + ("regular" if r.generators is None else "semigroup " + _fmt_tuples(r.generators))
    if r.a is not None:
        head += " a=" + ",".join(_fmt_rat(x) for x in r.a)
    lines = [head]
    for i in spec.ideals:
        lines.append(f"ideal {i.name} = {_fmt_tuples(i.generators)}")
    for f in spec.families:
        if f.corners is not None:
            args = _fmt_tuples(f.corners)
        elif f.kind == "custom":
            args = f"{f.base}, {_fmt_rat(f.t)}, {f.k}"
        elif f.kind == "power":
            args = f"{f.base}, {_fmt_rat(f.t)}"
        else:
            args = f.base
        lines.append(f"family {f.name} = {f.kind}({args})")
    for x in spec.experiments:
        parts = [f"experiment {x.kind} {x.family}"]
        for k, v in x.params:
            parts.append(f'{k}="{v}"' if PARAMS[k][0] == "str" else f"{k}={_fmt_rat(v) if not isinstance(v, int) else v}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
