"""Integer lattice utilities: Smith normal form, saturation, quotients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, Vector, mat, rank, solve, vec


def _int_rows(rows) -> list[list[int]]:
    out = []
    for r in rows:
        row = []
        for x in r:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError(f"not an integer entry: {x}")
            row.append(int(f))
        out.append(row)
    return out


def smith_normal_form(rows) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form D = U A V with U, V unimodular; returns (D, U, V)."""
    A = _int_rows(rows)
    m = len(A)
    n = len(A[0]) if A else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):  # row_i += q * row_j
        A[i] = [a + q * b for a, b in zip(A[i], A[j])]
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]

    def add_col(i, j, q):  # col_i += q * col_j
        for row in A:
            row[i] += q * row[j]
        for row in V:
            row[i] += q * row[j]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    t = 0
    while t < min(m, n):
        # find pivot with smallest absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t] != 0:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j] != 0:
                        swap_cols(t, j)
                        done = False
            if done:
                break
        if A[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce divisibility d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(min(m, n) - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a != 0 and b % a != 0:
                add_col(i, i + 1, 1)
                while True:
                    done = True
                    if A[i + 1][i] != 0:
                        q = A[i + 1][i] // A[i][i]
                        add_row(i + 1, i, -q)
                        if A[i + 1][i] != 0:
                            swap_rows(i, i + 1)
                            done = False
                    if A[i][i + 1] != 0:
                        q = A[i][i + 1] // A[i][i]
                        add_col(i + 1, i, -q)
                        if A[i][i + 1] != 0:
                            swap_cols(i, i + 1)
                            done = False
                    if done:
                        break
                if A[i][i] < 0:
                    negate_row(i)
                if A[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    return A, U, V


def smith_divisors(rows) -> list[int]:
    D, _, _ = smith_normal_form(rows)
    out = []
    for i in range(min(len(D), len(D[0]) if D else 0)):
        if D[i][i] != 0:
            out.append(abs(D[i][i]))
    return out


def cokernel_invariants(rows) -> tuple[int, list[int]]:
    """(free rank, torsion divisors) of Z^m / column-span for an m x n map."""
    A = _int_rows(rows)
    m = len(A)
    divisors = smith_divisors(A) if A and A[0] else []
    free = m - len(divisors)
    torsion = [d for d in divisors if d > 1]
    return free, torsion


def inverse_unimodular(rows) -> list[list[int]]:
    A = _int_rows(rows)
    n = len(A)
    fm = mat(A)
    cols = []
    for j in range(n):
        e = [Fraction(int(i == j)) for i in range(n)]
        x = solve(fm, e)
        if x is None:
            raise ValueError("matrix is singular")
        cols.append(x)
    inv = [[cols[j][i] for j in range(n)] for i in range(n)]
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def _sign_normalize(row: list[int]) -> list[int]:
    for x in row:
        if x != 0:
            return row if x > 0 else [-y for y in row]
    return row


@dataclass(frozen=True)
class SublatticeData:
    """A sublattice N^1 of Z^n with the induced quotient projection.

    projection maps Z^n onto Z^(n-k) with kernel the saturation of N^1; the
    Smith divisors of the given basis record the torsion markers of the dual
    quotient M^1 (nontrivial exactly when the input basis is unsaturated).
    """

    n: int
    given_basis: tuple
    saturation_basis: tuple
    projection: Matrix
    m2_basis: tuple
    m1_divisors: tuple

    @property
    def corank(self) -> int:
        return len(self.projection)

    @property
    def group(self) -> tuple[int, tuple[int, ...]]:
        """(torus rank, torsion divisors) of the acting group descriptor."""
        return len(self.saturation_basis), tuple(d for d in self.m1_divisors if d > 1)

    @staticmethod
    def from_kernel_basis(basis, n: int | None = None) -> "SublatticeData":
        rows = _int_rows(basis)
        if n is None:
            if not rows:
                raise ValueError("need ambient rank for empty basis")
            n = len(rows[0])
        if rows and rank(mat(rows)) != len(rows):
            raise ValueError("sublattice basis is not independent")
        if not rows:
            ident = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
            return SublatticeData(n, (), (), ident, ident, ())
        D, U, V = smith_normal_form(rows)
        r = len([i for i in range(min(len(D), n)) if D[i][i] != 0])
        Vinv = inverse_unimodular(V)
        sat = tuple(tuple(Vinv[i]) for i in range(r))
        proj_rows = [_sign_normalize([V[i][j] for i in range(n)]) for j in range(r, n)]
        proj = mat(proj_rows) if proj_rows else ()
        # the last columns of V are simultaneously the projection rows and an
        # integer basis of the annihilator M^2 = {m : <m, N^1> = 0}
        m2 = tuple(tuple(row) for row in proj_rows)
        divisors = tuple(smith_divisors(rows))
        return SublatticeData(n, tuple(tuple(r_) for r_ in rows), sat, proj, m2, divisors)

    @staticmethod
    def from_projection(proj, n_source: int | None = None) -> "SublatticeData":
        rows = _int_rows(proj)
        if not rows:
            raise ValueError("empty projection")
        m = mat(rows)
        n = len(rows[0])
        # integer kernel basis via SNF: last columns of V
        D, U, V = smith_normal_form(rows)
        r = len(smith_divisors(rows))
        kernel = tuple(
            tuple(V[i][j] for i in range(n)) for j in range(r, n)
        )
        divisors = tuple(smith_divisors(kernel)) if kernel else ()
        return SublatticeData(n, kernel, kernel, m, (), divisors)
