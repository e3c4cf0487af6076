"""Two-phase tableau simplex over exact rationals (Bland's rule).

Solves ``min c.x  s.t.  A x = b, x >= 0``. Sizes here are tiny (a handful of
rows, a few dozen columns), so a dense tableau of Fractions is fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[list[Fraction]] = None
    objective: Optional[Fraction] = None
    # On infeasibility: y with y.A >= 0 componentwise and y.b < 0.
    farkas: Optional[list[Fraction]] = None


def _pivot(tab: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    pr = tab[row]
    piv = pr[col]
    if piv != 1:
        tab[row] = pr = [v / piv for v in pr]
    for r, other in enumerate(tab):
        if r != row:
            f = other[col]
            if f:
                tab[r] = [a - f * b for a, b in zip(other, pr)]
    basis[row] = col


def _run(tab: list[list[Fraction]], basis: list[int], allowed: int) -> bool:
    """Minimise the objective held in the last row; columns >= ``allowed`` never enter.

    Returns False when unbounded.
    """
    m = len(basis)
    obj = tab[m]
    while True:
        obj = tab[m]
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return True
        best = None
        row = None
        for r in range(m):
            a = tab[r][col]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[row]):
                    best, row = ratio, r
        if row is None:
            return False
        _pivot(tab, basis, row, col)


def solve_lp(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction],
             c: Sequence[Fraction]) -> LPResult:
    m = len(a)
    n = len(c)
    a = [[Fraction(v) for v in row] for row in a]
    b = [Fraction(v) for v in b]
    sign = [1] * m
    for i in range(m):
        if b[i] < 0:
            sign[i] = -1
            a[i] = [-v for v in a[i]]
            b[i] = -b[i]

    # Phase 1 tableau: columns x (n), artificials (m), rhs.
    tab = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(a[i] + art + [b[i]])
    basis = [n + i for i in range(m)]
    # Objective row: sum of artificials, expressed in nonbasic terms.
    obj = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            obj[j] -= a[i][j]
        obj[-1] -= b[i]
    tab.append(obj)
    _run(tab, basis, n)

    phase1 = -tab[m][-1]
    if phase1 > 0:
        # Reduced cost of artificial i is 1 - y_i, with y the phase-1 duals.
        y = [1 - tab[m][n + i] for i in range(m)]
        farkas = [-y[i] * sign[i] for i in range(m)]
        return LPResult("infeasible", farkas=farkas)

    # Drive zero-level artificials out of the basis, dropping redundant rows.
    r = 0
    while r < len(basis):
        if basis[r] >= n:
            col = next((j for j in range(n) if tab[r][j] != 0), None)
            if col is None:
                del tab[r]
                del basis[r]
                continue
            _pivot(tab, basis, r, col)
        r += 1
    m2 = len(basis)
    tab = [row[:n] + [row[-1]] for row in tab[:m2]]

    obj = [Fraction(v) for v in c] + [Fraction(0)]
    for r, j in enumerate(basis):
        if obj[j]:
            f = obj[j]
            obj = [o - f * t for o, t in zip(obj, tab[r])]
    tab.append(obj)
    if not _run(tab, basis, n):
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for r, j in enumerate(basis):
        x[j] = tab[r][-1]
    return LPResult("optimal", x=x, objective=-tab[m2][-1])
