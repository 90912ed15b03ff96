"""Exact rational linear programming via the simplex method with Bland's rule.

This is the single LP backend used by convex-position tests, regularity
(lower-envelope) certificates, and fan projectivity certificates.  All
arithmetic is over Fraction; Bland's pivoting rule makes every run
deterministic and cycle-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, Vector, ZERO, dot, frac, matvec, nullspace, solve, sub, vec

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Vector | None
    value: Fraction | None


def _pivot(tab, basis, row, col):
    pv = tab[row][col]
    tab[row] = [x / pv for x in tab[row]]
    for i in range(len(tab)):
        if i != row and tab[i][col] != 0:
            f = tab[i][col]
            tab[i] = [x - f * y for x, y in zip(tab[i], tab[row])]
    basis[row] = col


def _run_simplex(tab, basis, ncols):
    """Bland's rule on a tableau whose last row is the (maximized) objective.

    Row format: coefficients over ncols columns, then the rhs.  Objective row
    stores negated reduced costs, so we pivot while a negative entry exists.
    """
    m = len(tab) - 1
    while True:
        obj = tab[m]
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return OPTIMAL
        row = None
        best = None
        for i in range(m):
            if tab[i][col] > 0:
                ratio = tab[i][ncols] / tab[i][col]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best = ratio
                    row = i
        if row is None:
            return UNBOUNDED
        _pivot(tab, basis, row, col)


def simplex_max_nonneg(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """max c.x subject to A x <= b, x >= 0 (two-phase tableau simplex)."""
    c = vec(c)
    A = [vec(r) for r in A]
    b = [frac(x) for x in b]
    m, n = len(A), len(c)
    # columns: n structural + m slacks (+ artificials in phase I), last = rhs
    tab = []
    basis = []
    art_cols = []
    ncols = n + m
    need_art = [i for i in range(m) if b[i] < 0]
    ncols_tot = ncols + len(need_art)
    art_of_row = {r: ncols + k for k, r in enumerate(need_art)}
    for i in range(m):
        row = list(A[i]) + [ZERO] * (m + len(need_art)) + [b[i]]
        row[n + i] = Fraction(1)
        if i in art_of_row:
            row = [-x for x in row]
            row[art_of_row[i]] = Fraction(1)
        tab.append(row)
        basis.append(art_of_row.get(i, n + i))
        if i in art_of_row:
            art_cols.append(art_of_row[i])

    if art_cols:
        # phase I: maximize -(sum of artificials)
        obj = [ZERO] * (ncols_tot + 1)
        for a in art_cols:
            obj[a] = Fraction(1)
        tab.append(obj)
        for i in range(m):
            if basis[i] in art_cols:
                f = tab[m][basis[i]]
                if f != 0:
                    tab[m] = [x - f * y for x, y in zip(tab[m], tab[i])]
        status = _run_simplex(tab, basis, ncols_tot)
        if status != OPTIMAL or tab[m][ncols_tot] != 0:
            return LPResult(INFEASIBLE, None, None)
        # drive remaining artificials out of the basis where possible
        for i in range(m):
            if basis[i] in art_cols:
                col = next((j for j in range(ncols) if tab[i][j] != 0), None)
                if col is not None:
                    _pivot(tab, basis, i, col)
        tab.pop()
        # drop artificial columns
        keep = list(range(ncols)) + [ncols_tot]
        tab = [[row[j] for j in keep] for row in tab]
        live = [i for i in range(m) if basis[i] < ncols]
        tab = [tab[i] for i in live]
        basis = [basis[i] for i in live]
        m = len(tab)

    obj = [-x for x in c] + [ZERO] * (ncols - n + 1)
    tab.append(obj)
    for i in range(m):
        if tab[m][basis[i]] != 0:
            f = tab[m][basis[i]]
            tab[m] = [x - f * y for x, y in zip(tab[m], tab[i])]
    status = _run_simplex(tab, basis, ncols)
    if status != OPTIMAL:
        return LPResult(UNBOUNDED, None, None)
    x = [ZERO] * ncols
    for i in range(m):
        x[basis[i]] = tab[i][ncols]
    return LPResult(OPTIMAL, tuple(x[:n]), tab[m][ncols])


def solve_lp(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """max c.x over free x with A_ub x <= b_ub and A_eq x = b_eq.

    Equalities are eliminated exactly (particular solution plus kernel
    parametrization) before the nonnegative-variable simplex runs, which keeps
    the tableaux small for the wall-convexity systems.
    """
    c = vec(c)
    n = len(c)
    A_ub = [vec(r) for r in A_ub]
    b_ub = [frac(x) for x in b_ub]
    if A_eq:
        A_eq = [vec(r) for r in A_eq]
        x0 = solve(A_eq, [frac(x) for x in b_eq])
        if x0 is None:
            return LPResult(INFEASIBLE, None, None)
        basis = nullspace(A_eq, ncols=n)
        c_red = tuple(dot(c, k) for k in basis)
        A_red = [tuple(dot(row, k) for k in basis) for row in A_ub]
        b_red = [b - dot(row, x0) for row, b in zip(A_ub, b_ub)]
        res = solve_lp(c_red, A_red, b_red)
        if res.status != OPTIMAL:
            return LPResult(res.status, None, None)
        x = list(x0)
        for t, k in zip(res.x, basis):
            x = [xi + t * ki for xi, ki in zip(x, k)]
        return LPResult(OPTIMAL, tuple(x), dot(c, tuple(x)))
    # split free variables x = u - v with u, v >= 0
    c2 = list(c) + [-ci for ci in c]
    A2 = [list(r) + [-x for x in r] for r in A_ub]
    res = simplex_max_nonneg(c2, A2, b_ub)
    if res.status != OPTIMAL:
        return res
    x = tuple(res.x[i] - res.x[n + i] for i in range(n))
    return LPResult(OPTIMAL, x, res.value)


def feasible(A_ub, b_ub, A_eq=(), b_eq=()) -> bool:
    n = len(A_ub[0]) if A_ub else (len(A_eq[0]) if A_eq else 0)
    res = solve_lp([ZERO] * n, A_ub, b_ub, A_eq, b_eq)
    return res.status == OPTIMAL


def in_convex_hull(point: Vector, points: Sequence[Vector]) -> bool:
    """Exact membership of a point in the convex hull of a point list."""
    pts = list(points)
    if not pts:
        return False
    k = len(pts)
    A_eq = []
    b_eq = []
    for j in range(len(point)):
        A_eq.append([p[j] for p in pts])
        b_eq.append(point[j])
    A_eq.append([Fraction(1)] * k)
    b_eq.append(Fraction(1))
    A_ub = [[-Fraction(1) if i == j else ZERO for i in range(k)] for j in range(k)]
    b_ub = [ZERO] * k
    return feasible(A_ub, b_ub, A_eq, b_eq)


def in_cone_hull(point: Vector, gens: Sequence[Vector]) -> bool:
    """Exact membership of a point in the nonnegative span of generators."""
    gens = list(gens)
    if not gens:
        return all(x == 0 for x in point)
    k = len(gens)
    A_eq = [[g[j] for g in gens] for j in range(len(point))]
    b_eq = list(point)
    A_ub = [[-Fraction(1) if i == j else ZERO for i in range(k)] for j in range(k)]
    b_ub = [ZERO] * k
    return feasible(A_ub, b_ub, A_eq, b_eq)
