"""Exact rational and integer linear algebra used by the polytope kernel."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence

Vec = tuple  # tuple of Fraction


def to_fraction(x) -> Fraction:
    """Convert ints, Fractions, floats (exactly) and "p/q" strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite scalar {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    # numpy scalars
    if hasattr(x, "item"):
        return to_fraction(x.item())
    raise TypeError(f"cannot interpret {x!r} as a rational scalar")


def to_vec(xs: Iterable) -> Vec:
    return tuple(to_fraction(x) for x in xs)


def format_fraction(x: Fraction) -> str | int:
    x = to_fraction(x)
    if x.denominator == 1:
        return x.numerator
    return f"{x.numerator}/{x.denominator}"


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = reduce(gcd, (abs(int(a)) for a in v), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(int(a) // g for a in v)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def common_denominator(xs: Iterable[Fraction]) -> int:
    return reduce(lcm, (to_fraction(x).denominator for x in xs), 1)


def integer_direction(v: Sequence) -> tuple[int, ...]:
    """Primitive integer vector pointing along a rational vector."""
    v = to_vec(v)
    den = common_denominator(v)
    return primitive([int(a * den) for a in v])


def homogeneous(point: Sequence[Fraction]) -> tuple[int, ...]:
    """Integer homogeneous coordinates (x*q, q) with q > 0 for a rational point."""
    den = common_denominator(point)
    return tuple(int(a * den) for a in point) + (den,)


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def null_vector_int(rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Generalized cross product of n-1 integer rows in Z^n (zero if dependent)."""
    n = len(rows) + 1
    out = []
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows]
        out.append((-1) ** j * det_int(minor))
    return tuple(out)


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = [list(map(to_fraction, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    if all(isinstance(a, int) for r in rows for a in r):
        return _rank_int(rows)
    return len(rref(rows)[1])


def _rank_int(rows: Sequence[Sequence[int]]) -> int:
    m = [list(r) for r in rows]
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c] != 0:
                a, b = m[r][c], m[i][c]
                m[i] = [a * x - b * y for x, y in zip(m[i], m[r])]
                g = reduce(gcd, (abs(x) for x in m[i]), 0)
                if g > 1:
                    m[i] = [x // g for x in m[i]]
        r += 1
        if r == len(m):
            break
    return r


def solve(a: Sequence[Sequence], b: Sequence) -> Vec | None:
    """Solve a square system exactly; None when singular."""
    n = len(a)
    m = [list(map(to_fraction, row)) + [to_fraction(bi)] for row, bi in zip(a, b)]
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        pv = m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / pv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    x = [Fraction(0)] * n
    for i in reversed(range(n)):
        s = m[i][n] - sum(m[i][j] * x[j] for j in range(i + 1, n))
        x[i] = s / m[i][i]
    return tuple(x)
