"""Two-phase simplex over exact rationals with Bland's rule.

Solves ``maximize c.x  s.t.  A x <= b, x >= 0`` where ``b`` may have any
sign. Rows are stored sparsely as ``{column: Fraction}``; desk-scale
problems (tens of rows, a few hundred columns) solve in milliseconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

ZERO = Fraction(0)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpSolution:
    status: str
    objective: Fraction | None = None
    x: list[Fraction] = field(default_factory=list)
    duals: list[Fraction] = field(default_factory=list)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows: list[dict[int, Fraction]] = rows
        self.rhs: list[Fraction] = rhs
        self.basis: list[int] = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r: int, col: int, objectives: list[dict[int, Fraction]]) -> None:
        row = self.rows[r]
        piv = row[col]
        if piv != 1:
            inv = 1 / piv
            for j in row:
                row[j] *= inv
            self.rhs[r] *= inv
        rhs_r = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(col)
            if not f:
                continue
            for j, a in row.items():
                v = other.get(j, ZERO) - f * a
                if v:
                    other[j] = v
                else:
                    other.pop(j, None)
            self.rhs[i] -= f * rhs_r
        for obj in objectives:
            f = obj.get(col)
            if not f:
                continue
            for j, a in row.items():
                v = obj.get(j, ZERO) - f * a
                if v:
                    obj[j] = v
                else:
                    obj.pop(j, None)
            obj[-1] = obj.get(-1, ZERO) + f * rhs_r
        self.basis[r] = col
        self.pivots += 1

    def run(self, obj: dict[int, Fraction], allowed, others=()) -> str:
        """Maximize; ``obj`` holds reduced costs (positive = improving)."""
        while True:
            col = None
            for j in sorted(k for k, v in obj.items() if k >= 0 and v > 0):
                if allowed(j):
                    col = j
                    break
            if col is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(col)
                if a is not None and a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], col, [obj, *others])


def solve_lp(
    c: Sequence,
    A: Sequence[Mapping[int, object]],
    b: Sequence,
) -> LpSolution:
    """Maximize ``c.x`` subject to ``A x <= b`` and ``x >= 0``.

    ``A`` is a list of sparse rows ``{column: coefficient}``. Returned
    ``duals`` are the optimal multipliers of the rows (nonnegative), so that
    ``b.duals == objective`` at optimality.
    """
    n = len(c)
    m = len(A)
    slack0 = n
    art0 = n + m
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    artificials = []
    for i, (row, bi) in enumerate(zip(A, b)):
        r = {j: Fraction(v) for j, v in row.items() if v}
        r[slack0 + i] = Fraction(1)
        bi = Fraction(bi)
        if bi < 0:
            r = {j: -v for j, v in r.items()}
            bi = -bi
            a = art0 + len(artificials)
            r[a] = Fraction(1)
            artificials.append(a)
            basis.append(a)
        else:
            basis.append(slack0 + i)
        rows.append(r)
        rhs.append(bi)
    tab = _Tableau(rows, rhs, basis, art0 + len(artificials))

    # objective rows store reduced costs; key -1 holds the current value
    obj = {j: Fraction(v) for j, v in enumerate(c) if v}
    obj[-1] = ZERO

    if artificials:
        art = set(artificials)
        phase1: dict[int, Fraction] = {-1: ZERO}
        for i, bv in enumerate(basis):
            if bv in art:
                for j, v in rows[i].items():
                    if j not in art:
                        phase1[j] = phase1.get(j, ZERO) + v
                phase1[-1] -= rhs[i]
        tab.run(phase1, lambda j: True, others=[obj])
        if phase1[-1] != 0:
            return LpSolution(INFEASIBLE, pivots=tab.pivots)
        # drive remaining (zero-level) artificials out of the basis
        for i, bv in enumerate(tab.basis):
            if bv in art:
                col = next((j for j in sorted(rows[i]) if j not in art and rows[i][j] != 0), None)
                if col is not None:
                    tab.pivot(i, col, [obj])
        allowed = lambda j: j not in art  # noqa: E731
    else:
        allowed = lambda j: True  # noqa: E731

    status = tab.run(obj, allowed)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, pivots=tab.pivots)
    x = [ZERO] * n
    for i, bv in enumerate(tab.basis):
        if bv < n:
            x[bv] = tab.rhs[i]
    # reduced cost of slack i is -y_i
    duals = [-obj.get(slack0 + i, ZERO) for i in range(m)]
    value = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), ZERO)
    return LpSolution(OPTIMAL, value, x, duals, tab.pivots)
