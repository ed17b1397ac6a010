"""Small exact linear algebra over the rationals.

Matrices are lists of rows of :class:`fractions.Fraction`.  Everything here is
sized for Gram matrices of a handful of generators, so plain Gaussian
elimination is used throughout.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

Matrix = list[list[Fraction]]


class RationalParseError(ValueError):
    pass


def Q(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: a float has already lost exactness.
    """
    if isinstance(value, bool):
        raise RationalParseError(f"boolean is not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise RationalParseError(f"not a rational: {value!r}") from exc
    raise RationalParseError(f"not a rational: {value!r} ({type(value).__name__})")


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def matrix(rows: Iterable[Iterable]) -> Matrix:
    return [[Q(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def bilinear(u: Sequence, gram: Sequence[Sequence], v: Sequence):
    """u^T G v; entries of G may be any ring elements (e.g. sympy symbols)."""
    total = 0
    for i, ui in enumerate(u):
        if ui == 0:
            continue
        for j, vj in enumerate(v):
            if vj == 0:
                continue
            total = total + ui * gram[i][j] * vj
    return total


def is_symmetric(a: Sequence[Sequence]) -> bool:
    n = len(a)
    return all(len(row) == n for row in a) and all(
        a[i][j] == a[j][i] for i in range(n) for j in range(i + 1, n)
    )


def det(a: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(map(Q, row)) for row in a]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            factor = m[r][col] / p
            if factor:
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return sign * result


def inverse(a: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(a)
    m = [list(map(Q, row)) + identity(n)[i] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """One exact solution of the (possibly rectangular) system a x = b, or None."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [list(map(Q, row)) + [Q(bi)] for row, bi in zip(a, b)]
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(all(x == 0 for x in row[:cols]) and row[cols] != 0 for row in m):
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = m[i][cols]
    return x


def is_positive_semidefinite(a: Sequence[Sequence[Fraction]]) -> bool:
    """Symmetric and every principal minor is >= 0."""
    if not is_symmetric(a):
        return False
    n = len(a)
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            if det([[a[i][j] for j in idx] for i in idx]) < 0:
                return False
    return True


def is_negative_definite(a: Sequence[Sequence[Fraction]]) -> bool:
    """Leading principal minors alternate in sign, starting negative."""
    if not is_symmetric(a):
        return False
    for k in range(1, len(a) + 1):
        d = det([row[:k] for row in a[:k]])
        if d == 0 or (d > 0) != (k % 2 == 0):
            return False
    return True
