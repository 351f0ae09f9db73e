"""Exact rational linear programming.

Dense two-phase tableau simplex over fractions, with Bland's rule so the
iteration terminates without any anti-cycling perturbation.  Solves

    minimize c.x  subject to  A x = b,  x >= 0

and reports, besides the optimum, an exact dual solution (for certificate
extraction) or an exact Farkas witness of infeasibility.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

# generous bound; Bland's rule terminates long before on desk-scale inputs
MAX_PIVOTS = 2_000_000


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    objective: Fraction | None = None
    dual: list[Fraction] | None = None
    farkas: list[Fraction] | None = None


class _Tableau:
    def __init__(self, A, b):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        self.signs = []
        self.rows = []
        for i in range(self.m):
            row = [Fraction(v) for v in A[i]]
            rhs = Fraction(b[i])
            sign = 1
            if rhs < 0:
                row = [-v for v in row]
                rhs = -rhs
                sign = -1
            self.signs.append(sign)
            art = [Fraction(0)] * self.m
            art[i] = Fraction(1)
            self.rows.append(row + art + [rhs])
        self.basis = [self.n + i for i in range(self.m)]
        self.orig_rows = list(range(self.m))  # original index of each live row

    @property
    def width(self):
        return self.n + self.m + 1

    def pivot(self, r, j):
        piv = self.rows[r][j]
        self.rows[r] = [v / piv for v in self.rows[r]]
        for i in range(len(self.rows)):
            if i != r and self.rows[i][j] != 0:
                f = self.rows[i][j]
                self.rows[i] = [a - f * b for a, b in zip(self.rows[i], self.rows[r])]
        self.basis[r] = j

    def reduced_costs(self, cost):
        mult = [cost[self.basis[i]] for i in range(len(self.rows))]
        rc = []
        for j in range(self.n + self.m):
            val = cost[j]
            for i, row in enumerate(self.rows):
                if mult[i] != 0 and row[j] != 0:
                    val -= mult[i] * row[j]
            rc.append(val)
        return rc

    def run(self, cost, allow_artificial):
        pivots = 0
        while True:
            rc = self.reduced_costs(cost)
            limit = self.n + self.m if allow_artificial else self.n
            enter = next((j for j in range(limit) if rc[j] < 0), None)
            if enter is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                if row[enter] > 0:
                    ratio = row[-1] / row[enter]
                    if best is None or ratio < best[0] or (ratio == best[0] and self.basis[i] < self.basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], enter)
            pivots += 1
            assert pivots <= MAX_PIVOTS, "simplex cycling under Bland's rule"

    def objective_value(self, cost):
        return sum((cost[self.basis[i]] * self.rows[i][-1] for i in range(len(self.rows))),
                   Fraction(0))

    def duals(self, cost, m_original):
        """y_i over the original rows, from the carried inverse-basis columns."""
        y = [Fraction(0)] * m_original
        mult = [cost[self.basis[i]] for i in range(len(self.rows))]
        for i0 in range(m_original):
            col = self.n + i0
            val = sum((mult[i] * self.rows[i][col] for i in range(len(self.rows))), Fraction(0))
            y[i0] = self.signs[i0] * val
        return y

    def solution(self):
        x = [Fraction(0)] * self.n
        for i, j in enumerate(self.basis):
            if j < self.n:
                x[j] = self.rows[i][-1]
        return x


def solve_lp(A, b, c) -> LPResult:
    """Minimize c.x subject to A x = b, x >= 0 (everything exact rationals)."""
    m = len(A)
    n = len(A[0]) if A else len(c)
    if m == 0:
        obj = Fraction(0)
        return LPResult("optimal", [Fraction(0)] * n, obj, [], None)

    tab = _Tableau(A, b)
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    tab.run(phase1, allow_artificial=True)
    infeas = tab.objective_value(phase1)
    if infeas > 0:
        y = tab.duals(phase1, m)
        # y.b = infeas > 0 and y^T A <= 0: exact witness that {x >= 0, Ax = b} is empty
        return LPResult("infeasible", farkas=[-v for v in y])

    # drive artificials out of the basis; drop rows that became redundant
    for r in range(len(tab.rows) - 1, -1, -1):
        if tab.basis[r] >= n:
            enter = next((j for j in range(n) if tab.rows[r][j] != 0), None)
            if enter is None:
                del tab.rows[r]
                del tab.basis[r]
            else:
                tab.pivot(r, enter)

    cost = [Fraction(v) for v in c] + [Fraction(0)] * m
    status = tab.run(cost, allow_artificial=False)
    if status == "unbounded":
        return LPResult("unbounded")
    x = tab.solution()
    return LPResult("optimal", x, tab.objective_value(cost), tab.duals(cost, m), None)


def solve_square(M, rhs):
    """Exact solution of a square linear system, or None when singular."""
    n = len(M)
    aug = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pval = aug[col][col]
        aug[col] = [v / pval for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * bb for a, bb in zip(aug[r], aug[col])]
    return [aug[i][-1] for i in range(n)]


def _independent_rows(A, b):
    """Row-reduce [A | b]; returns (rows, rhs) without redundancy, or None if
    the system contains an inconsistent 0 = nonzero row."""
    aug = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    n = len(A[0]) if A else 0
    rk = 0
    for col in range(n):
        piv = next((r for r in range(rk, len(aug)) if aug[r][col] != 0), None)
        if piv is None:
            continue
        aug[rk], aug[piv] = aug[piv], aug[rk]
        pv = aug[rk][col]
        aug[rk] = [v / pv for v in aug[rk]]
        for r in range(len(aug)):
            if r != rk and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * bb for a, bb in zip(aug[r], aug[rk])]
        rk += 1
    for r in range(rk, len(aug)):
        if aug[r][-1] != 0:
            return None
    return [row[:-1] for row in aug[:rk]], [row[-1] for row in aug[:rk]]


def enumerate_basic_feasible(A, b):
    """All basic feasible solutions of {A x = b, x >= 0}, one per feasible basis.

    Exponential in the column count; meant as an independent oracle against
    the simplex path on small instances.  Redundant rows are eliminated
    first, so degenerate constraint systems are handled.
    """
    reduced = _independent_rows(A, b)
    if reduced is None:
        return []
    A, b = reduced
    m = len(A)
    n = len(A[0]) if A else 0
    if m == 0:
        return [[Fraction(0)] * n]
    seen = set()
    out = []
    for cols in itertools.combinations(range(n), m):
        square = [[A[i][j] for j in cols] for i in range(m)]
        sol = solve_square(square, b)
        if sol is None or any(v < 0 for v in sol):
            continue
        x = [Fraction(0)] * n
        for j, v in zip(cols, sol):
            x[j] = v
        key = tuple(x)
        if key not in seen:
            seen.add(key)
            out.append(x)
    return out


def rank(rows) -> int:
    """Exact rank of a list of rational vectors."""
    mat = [list(map(Fraction, r)) for r in rows]
    cols = len(mat[0]) if mat else 0
    rk = 0
    for col in range(cols):
        piv = next((r for r in range(rk, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rk], mat[piv] = mat[piv], mat[rk]
        pv = mat[rk][col]
        mat[rk] = [v / pv for v in mat[rk]]
        for r in range(len(mat)):
            if r != rk and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * bb for a, bb in zip(mat[r], mat[rk])]
        rk += 1
    return rk
