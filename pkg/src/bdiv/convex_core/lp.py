"""Exact linear programming over the rationals.

Problems are stated as ``maximize c.x  subject to  A x <= b`` with free
variables.  A floating-point HiGHS solve proposes an optimal basis; the basis is
then re-solved and certified in exact arithmetic (primal and dual feasibility).
If certification fails, a dense two-phase simplex with Bland's rule runs over
``Fraction`` and settles the problem exactly.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .exact import dot, rank, solve, to_fraction

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    objective: Fraction | None = None
    witness: tuple | None = None
    # nonnegative multipliers on the rows of A; for optimal results they
    # certify optimality (A^T y = c), for infeasible ones they are a Farkas
    # certificate (A^T y = 0, b.y < 0)
    dual: tuple | None = None


def _as_exact(c, A, b):
    c = tuple(to_fraction(x) for x in c)
    A = [tuple(to_fraction(x) for x in row) for row in A]
    b = tuple(to_fraction(x) for x in b)
    if any(len(row) != len(c) for row in A) or len(A) != len(b):
        raise ValueError("inconsistent LP dimensions")
    return c, A, b


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Exactly solve max c.x s.t. A x <= b with x free."""
    c, A, b = _as_exact(c, A, b)
    if not A:
        if any(c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, Fraction(0), tuple(Fraction(0) for _ in c), ())
    res = _float_then_certify(c, A, b)
    if res is not None:
        return res
    return simplex(c, A, b)


def _feasible(A, b, x) -> bool:
    return all(dot(row, x) <= bi for row, bi in zip(A, b))


def _float_then_certify(c, A, b) -> LPResult | None:
    n = len(c)
    Af = np.array([[float(x) for x in row] for row in A])
    bf = np.array([float(x) for x in b])
    cf = np.array([float(x) for x in c])
    # row scaling keeps HiGHS away from huge integer coefficients
    norms = np.max(np.abs(np.column_stack([Af, bf])), axis=1)
    norms[norms == 0] = 1.0
    Af, bf = Af / norms[:, None], bf / norms
    scale = max(1.0, float(np.max(np.abs(Af))) if Af.size else 1.0)
    try:
        res = linprog(-cf, A_ub=Af, b_ub=bf, bounds=[(None, None)] * n, method="highs")
    except ValueError:
        return None
    if res.status != 0:
        return None
    x = res.x
    y = -np.asarray(res.ineqlin.marginals)
    slack = bf - Af @ x
    tol = 1e-7 * max(1.0, float(np.max(np.abs(bf)))) * scale
    active = [i for i in range(len(A)) if slack[i] <= tol]
    active.sort(key=lambda i: (-y[i], slack[i]))
    if not any(c):
        return _certify_feasible(A, b, active, n)
    # greedy basis by dual weight first, completed by the least slack rows
    order = active + sorted((i for i in range(len(A)) if i not in set(active)), key=lambda i: slack[i])
    basis = _independent_rows(A, order, n)
    if basis is not None:
        out = _certify_basis(c, A, b, basis)
        if out is not None:
            return out
        out = _basis_simplex(c, A, b, basis)
        if out is not None:
            return out
    # small degenerate active sets: try other bases
    if len(active) <= 12:
        for combo in itertools.combinations(active, n):
            if rank([A[i] for i in combo]) < n:
                continue
            out = _certify_basis(c, A, b, list(combo))
            if out is not None:
                return out
    return None


def _independent_rows(A, candidates, n):
    chosen: list[int] = []
    for i in candidates:
        if rank([A[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == n:
                return chosen
    return None


def _certify_basis(c, A, b, basis) -> LPResult | None:
    AB = [A[i] for i in basis]
    x = solve(AB, [b[i] for i in basis])
    if x is None or not _feasible(A, b, x):
        return None
    AT = [[AB[r][k] for r in range(len(basis))] for k in range(len(c))]
    yB = solve(AT, c)
    if yB is None or any(v < 0 for v in yB):
        return None
    y = [Fraction(0)] * len(A)
    for i, v in zip(basis, yB):
        y[i] = v
    return LPResult(OPTIMAL, dot(c, x), x, tuple(y))


def _basis_simplex(c, A, b, basis, max_iter: int = 10_000) -> LPResult | None:
    """Exact simplex over row bases, warm-started from a float basis.

    A basis is n linearly independent rows; its vertex is x = A_B^{-1} b_B and
    its multipliers y_B = A_B^{-T} c.  Dual-feasible starts take dual steps,
    primal-feasible ones take primal steps.  Returns None when the start is
    neither (the caller then falls back to the tableau method).
    """
    m, n = len(A), len(c)
    basis = list(basis)
    for it in range(max_iter):
        bland = it > 50
        AB = [A[i] for i in basis]
        x = solve(AB, [b[i] for i in basis])
        AT = [[AB[r][k] for r in range(n)] for k in range(n)]
        yB = solve(AT, c)
        if x is None or yB is None:
            return None
        viol = [(dot(A[j], x) - b[j], j) for j in range(m)]
        viol = [(v, j) for v, j in viol if v > 0]
        neg = [(yB[k], k) for k in range(n) if yB[k] < 0]
        if not viol and not neg:
            y = [Fraction(0)] * m
            for i, v in zip(basis, yB):
                y[i] = v
            return LPResult(OPTIMAL, dot(c, x), x, tuple(y))
        if viol and not neg:
            # dual step: violated row r enters
            r = min(viol, key=lambda t: t[1])[1] if bland else max(viol)[1]
            lam = solve(AT, list(A[r]))
            cand = [(yB[k] / lam[k], basis[k], k) for k in range(n) if lam[k] > 0]
            if not cand:
                return LPResult(INFEASIBLE, dual=_farkas(A, b))
            _, _, k = min(cand)
            basis[k] = r
        elif neg and not viol:
            # primal step: leave a row with negative multiplier
            _, k = min(neg, key=lambda t: basis[t[1]]) if bland else min(neg)
            e = [Fraction(0)] * n
            e[k] = Fraction(-1)
            direction = solve(AB, e)
            cand = []
            for j in range(m):
                if j in basis:
                    continue
                rate = dot(A[j], direction)
                if rate > 0:
                    cand.append(((b[j] - dot(A[j], x)) / rate, j))
            if not cand:
                return LPResult(UNBOUNDED)
            basis[k] = min(cand)[1]
        else:
            return None
    return None


def _certify_feasible(A, b, active, n) -> LPResult | None:
    # zero objective: any exactly feasible point will do
    r = rank([A[i] for i in range(len(A))])
    if r < n:
        return None
    basis = _independent_rows(A, active, n)
    if basis is None:
        return None
    x = solve([A[i] for i in basis], [b[i] for i in basis])
    if x is None or not _feasible(A, b, x):
        return None
    return LPResult(OPTIMAL, Fraction(0), x, tuple(Fraction(0) for _ in A))


# --------------------------------------------------------------------------
# dense exact simplex


def simplex(c: Sequence, A: Sequence[Sequence], b: Sequence, certify: bool = True) -> LPResult:
    """Two-phase tableau simplex with Bland's rule, exact over Fraction.

    Variables are split as x = p - q (p, q >= 0); slacks make rows equalities.
    """
    c, A, b = _as_exact(c, A, b)
    m, n = len(A), len(c)
    # columns: p (n), q (n), slack (m), artificial (one per row with b < 0)
    neg_rows = [i for i in range(m) if b[i] < 0]
    nart = len(neg_rows)
    ncol = 2 * n + m + nart
    T: list[list[Fraction]] = []
    basis: list[int] = []
    art_of_row = {r: k for k, r in enumerate(neg_rows)}
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(0)] * (ncol + 1)
        for j in range(n):
            row[j] = sign * A[i][j]
            row[n + j] = -sign * A[i][j]
        row[2 * n + i] = Fraction(sign)
        if i in art_of_row:
            col = 2 * n + m + art_of_row[i]
            row[col] = Fraction(1)
            basis.append(col)
        else:
            basis.append(2 * n + i)
        row[ncol] = sign * b[i]
        T.append(row)

    def pivot(r, col):
        pv = T[r][col]
        T[r] = [v / pv for v in T[r]]
        for i in range(m):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                T[i] = [a - f * bb for a, bb in zip(T[i], T[r])]
        basis[r] = col

    def run(obj, allowed):
        # obj: coefficients to maximize over columns; returns False if unbounded
        while True:
            # reduced costs: obj_j - sum_i obj_basis_i * T[i][j]
            entering = None
            for j in allowed:
                if j in basis:
                    continue
                rc = obj[j] - sum(obj[basis[i]] * T[i][j] for i in range(m))
                if rc > 0:
                    entering = j
                    break
            if entering is None:
                return True
            best = None
            for i in range(m):
                if T[i][entering] > 0:
                    ratio = T[i][ncol] / T[i][entering]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return False
            pivot(best[1], entering)

    if nart:
        obj1 = [Fraction(0)] * ncol
        for k in range(nart):
            obj1[2 * n + m + k] = Fraction(-1)
        run(obj1, range(ncol))
        if sum(T[i][ncol] for i in range(m) if basis[i] >= 2 * n + m) > 0:
            return LPResult(INFEASIBLE, dual=_farkas(A, b) if certify else None)
        # drive artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= 2 * n + m:
                col = next((j for j in range(2 * n + m) if T[i][j] != 0), None)
                if col is not None:
                    pivot(i, col)
    obj2 = [Fraction(0)] * ncol
    for j in range(n):
        obj2[j] = c[j]
        obj2[n + j] = -c[j]
    if not run(obj2, range(2 * n + m)):
        return LPResult(UNBOUNDED)
    vals = [Fraction(0)] * ncol
    for i in range(m):
        vals[basis[i]] = T[i][ncol]
    x = tuple(vals[j] - vals[n + j] for j in range(n))
    # duals read off the slack columns; row flips cancel out
    y = []
    for i in range(m):
        col = 2 * n + i
        y.append(sum(obj2[basis[k]] * T[k][col] for k in range(m)))
    return LPResult(OPTIMAL, dot(c, x), x, tuple(y))


def _farkas(A, b) -> tuple | None:
    """Nonnegative y with A^T y = 0 and b.y = -1 (exists iff Ax <= b is infeasible)."""
    m, n = len(A), len(A[0]) if A else 0
    # variables y (m); constraints: -y <= 0, A^T y = 0 (two-sided), b.y = -1 (two-sided)
    rows, rhs = [], []
    for i in range(m):
        r = [Fraction(0)] * m
        r[i] = Fraction(-1)
        rows.append(r)
        rhs.append(Fraction(0))
    for k in range(n):
        col = [A[i][k] for i in range(m)]
        rows.append(col)
        rhs.append(Fraction(0))
        rows.append([-v for v in col])
        rhs.append(Fraction(0))
    rows.append(list(b))
    rhs.append(Fraction(-1))
    rows.append([-v for v in b])
    rhs.append(Fraction(1))
    res = simplex([Fraction(0)] * m, rows, rhs, certify=False)
    return res.witness if res.status == OPTIMAL else None


def feasible_point(A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Exact feasibility of A x <= b; infeasible results carry a Farkas certificate."""
    A = [tuple(map(to_fraction, r)) for r in A]
    b = tuple(map(to_fraction, b))
    n = len(A[0]) if A else 0
    res = maximize([Fraction(0)] * n, A, b)
    if res.status == INFEASIBLE and res.dual is None:
        return LPResult(INFEASIBLE, dual=_farkas(A, b))
    return res
