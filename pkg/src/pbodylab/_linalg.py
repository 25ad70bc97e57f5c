"""Small exact linear algebra over Q and Z (dimensions <= 6)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def det(rows: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return sign * result


def row_echelon(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    out: list[list[Fraction]] = []
    for col in range(ncols):
        piv = next((r for r in m if r[col] != 0), None)
        if piv is None:
            continue
        m.remove(piv)
        piv = [x / piv[col] for x in piv]
        m = [[a - r[col] * b for a, b in zip(r, piv)] for r in m]
        out = [[a - r[col] * b for a, b in zip(r, piv)] for r in out]
        out.append(piv)
    return out


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_echelon(rows))


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    v = [Fraction(x) for x in v]
    L = lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * L) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[int, ...]]:
    """Integer basis (primitive vectors) of {x : r.x = 0 for all rows}."""
    ech = row_echelon(rows) if rows else []
    pivots = []
    for r in ech:
        pivots.append(next(i for i, x in enumerate(r) if x != 0))
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, pc in zip(ech, pivots):
            x[pc] = -r[f]
        basis.append(primitive(x))
    return basis


def cross(vectors: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Generalized cross product of d-1 vectors in Z^d (signed maximal minors)."""
    d = len(vectors) + 1
    out = []
    for i in range(d):
        minor = [[v[j] for j in range(d) if j != i] for v in vectors]
        out.append((-1) ** i * det(minor) if minor else Fraction(1))
    return tuple(int(x) for x in out)


def lattice_index(vectors: Sequence[Sequence[int]], d: int) -> int:
    """Index of the subgroup of Z^d generated by `vectors`; 0 when rank < d.

    Row-reduces over Z (Hermite style, via extended gcd) and multiplies the
    pivots.
    """
    m = [list(map(int, v)) for v in vectors if any(v)]
    index = 1
    row = 0
    for col in range(d):
        # gather rows below `row` with nonzero entry in col, gcd-combine them
        while True:
            nz = [r for r in range(row, len(m)) if m[r][col] != 0]
            if not nz:
                return 0
            best = min(nz, key=lambda r: abs(m[r][col]))
            m[row], m[best] = m[best], m[row]
            done = True
            for r in range(row + 1, len(m)):
                if m[r][col]:
                    q = m[r][col] // m[row][col]
                    m[r] = [a - q * b for a, b in zip(m[r], m[row])]
                    if m[r][col]:
                        done = False
            if done:
                break
        index *= abs(m[row][col])
        row += 1
    return index


def solve(matrix_cols: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve M x = rhs where M is given by its columns (square, invertible)."""
    n = len(rhs)
    aug = [[Fraction(matrix_cols[j][i]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]
