"""Exact linear algebra over the rationals and the integers.

Everything here operates on tiny dense matrices (at most rank+2 square:
Cartan matrices, Gram blocks, lattice bases), so Gaussian elimination with
``Fraction`` entries is fast enough and keeps the algebraic layer free of
floating-point drift.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]


def as_fraction_matrix(rows) -> Mat:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def as_fraction_vector(row) -> Vec:
    return tuple(Fraction(x) for x in row)


def identity(n: int) -> Mat:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def mat_vec(m: Mat, v) -> Vec:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = list(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def invert(m: Mat) -> Mat:
    """Gauss-Jordan inverse; raises ValueError on a singular matrix."""
    n = len(m)
    aug = [list(row) + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = Fraction(1) / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def solve(a: Mat, b) -> Vec:
    return mat_vec(invert(a), as_fraction_vector(b))


def nullspace(m) -> list[Vec]:
    """Basis of the right null space of a rational matrix."""
    m = [list(row) for row in as_fraction_matrix(m)]
    rows, cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv_p = Fraction(1) / m[r][c]
        m[r] = [x * inv_p for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for pr, pc in enumerate(pivots):
            v[pc] = -m[pr][fc]
        basis.append(tuple(v))
    return basis


def primitive_integer_vector(v) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (gcd 1).

    The sign is normalized so that the first nonzero entry is positive.
    """
    v = as_fraction_vector(v)
    if all(x == 0 for x in v):
        raise ValueError("zero vector has no primitive form")
    denom_lcm = 1
    for x in v:
        denom_lcm = denom_lcm * x.denominator // gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def hermite_normal_form(rows) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of an integer row span.

    Returns the nonzero rows: pivots positive, entries above each pivot
    reduced to ``[0, pivot)``.  Two generating sets span the same lattice
    iff their HNFs coincide.
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    ncols = len(rows[0]) if rows else 0
    result: list[list[int]] = []
    col = 0
    while work and col < ncols:
        sel = [r for r in work if r[col] != 0]
        if not sel:
            col += 1
            continue
        while len(sel) > 1 or any(r[col] != 0 for r in work if r is not sel[0]):
            sel.sort(key=lambda r: abs(r[col]))
            p = sel[0]
            for r in work:
                if r is not p and r[col] != 0:
                    q = r[col] // p[col]
                    for j in range(ncols):
                        r[j] -= q * p[j]
            sel = [r for r in work if r[col] != 0]
            if len(sel) <= 1:
                break
        if sel:
            pivot_row = sel[0]
            if pivot_row[col] < 0:
                pivot_row[:] = [-x for x in pivot_row]
            work.remove(pivot_row)
            work = [r for r in work if any(r)]
            result.append(pivot_row)
        col += 1
    # reduce entries above pivots
    for i in reversed(range(len(result))):
        pcol = next(j for j in range(ncols) if result[i][j] != 0)
        pval = result[i][pcol]
        for k in range(i):
            q = result[k][pcol] // pval
            if q:
                result[k] = [a - q * b for a, b in zip(result[k], result[i])]
    return [tuple(r) for r in result]
