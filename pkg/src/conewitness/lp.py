"""Exact rational linear programming with Farkas certificates.

Problems are equality systems ``A x = b`` with a chosen subset of variables
constrained to be nonnegative (the rest are free) and an optional objective to
maximize.  :func:`solve` runs a dense two-phase tableau simplex under Bland's
rule, so it always terminates and is deterministic.  Infeasibility is always
reported together with multipliers ``y`` such that ``y A`` is nonnegative on
the nonnegative variables, zero on the free ones, and ``y . b < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Union

from .geometry import Vector, dot, rref, vec

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LpProblem:
    num_vars: int
    equalities: tuple[tuple[Vector, Fraction], ...]
    nonneg_vars: frozenset[int]
    objective: Optional[Vector] = None

    def __post_init__(self):
        for coeffs, _ in self.equalities:
            if len(coeffs) != self.num_vars:
                raise ValueError("coefficient vector length differs from num_vars")
        if self.objective is not None and len(self.objective) != self.num_vars:
            raise ValueError("objective length differs from num_vars")
        if any(not 0 <= j < self.num_vars for j in self.nonneg_vars):
            raise ValueError("nonneg variable index out of range")

    @classmethod
    def build(cls, rows, rhs, nonneg=None, objective=None) -> "LpProblem":
        rows = [vec(r) for r in rows]
        n = len(rows[0]) if rows else (len(objective) if objective is not None else 0)
        nonneg = frozenset(range(n)) if nonneg is None else frozenset(nonneg)
        obj = vec(objective) if objective is not None else None
        return cls(n, tuple(zip(rows, vec(rhs))), nonneg, obj)

    def is_solution(self, x) -> bool:
        return (
            len(x) == self.num_vars
            and all(dot(a, x) == b for a, b in self.equalities)
            and all(x[j] >= 0 for j in self.nonneg_vars)
        )


@dataclass(frozen=True)
class FarkasCertificate:
    multipliers: Vector


@dataclass(frozen=True)
class Feasible:
    solution: Vector
    objective_value: Optional[Fraction] = None


@dataclass(frozen=True)
class Infeasible:
    certificate: FarkasCertificate


@dataclass(frozen=True)
class Unbounded:
    ray: Vector
    solution: Vector


LpOutcome = Union[Feasible, Infeasible, Unbounded]


def verify_certificate(p: LpProblem, c: FarkasCertificate) -> bool:
    y = c.multipliers
    if len(y) != len(p.equalities):
        return False
    for j in range(p.num_vars):
        combined = sum((yi * a[j] for yi, (a, _) in zip(y, p.equalities)), ZERO)
        if j in p.nonneg_vars:
            if combined < 0:
                return False
        elif combined != 0:
            return False
    return dot(y, [b for _, b in p.equalities]) < 0


# ---------------------------------------------------------------------------


class _Tableau:
    """Dense tableau ``B^-1 [A | b]`` with an explicit basis list."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis

    @property
    def width(self) -> int:
        return len(self.rows[0]) - 1 if self.rows else 0

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            row = [x / piv for x in row]
            self.rows[r] = row
        for i, other in enumerate(self.rows):
            if i != r and other[c] != 0:
                f = other[c]
                self.rows[i] = [x - f * y for x, y in zip(other, row)]
        self.basis[r] = c

    def reduced_costs(self, cost: list[Fraction], allowed: range) -> dict[int, Fraction]:
        cb = [cost[b] for b in self.basis]
        out = {}
        for j in allowed:
            out[j] = cost[j] - sum((cb[i] * self.rows[i][j] for i in range(len(self.rows)) if cb[i]), ZERO)
        return out

    def run(self, cost: list[Fraction], allowed: range) -> Optional[int]:
        """Minimize ``cost . x`` with Bland's rule.  Returns an unbounded column or None."""
        while True:
            rc = self.reduced_costs(cost, allowed)
            entering = next((j for j in allowed if rc[j] < 0), None)
            if entering is None:
                return None
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return entering
            self.pivot(best[1], entering)

    def point(self, n: int) -> list[Fraction]:
        x = [ZERO] * n
        for i, b in enumerate(self.basis):
            if b < n:
                x[b] = self.rows[i][-1]
        return x


def _standard_form(p: LpProblem):
    """Columns of the standard-form system: each free variable becomes a +/- pair."""
    columns: list[tuple[int, int]] = []  # (original var, sign)
    for j in range(p.num_vars):
        columns.append((j, 1))
        if j not in p.nonneg_vars:
            columns.append((j, -1))
    a = [[sign * coeffs[j] for j, sign in columns] for coeffs, _ in p.equalities]
    b = [rhs for _, rhs in p.equalities]
    return columns, a, b


def _recombine(columns, values, n) -> Vector:
    x = [ZERO] * n
    for (j, sign), v in zip(columns, values):
        x[j] += sign * v
    return tuple(x)


def solve(p: LpProblem) -> LpOutcome:
    columns, a, b = _standard_form(p)
    m, n = len(a), len(columns)
    signs = [ONE if rhs >= 0 else -ONE for rhs in b]
    rows = []
    for i in range(m):
        art = [ZERO] * m
        art[i] = ONE
        rows.append([signs[i] * x for x in a[i]] + art + [signs[i] * b[i]])
    tab = _Tableau(rows, [n + i for i in range(m)])

    phase1_cost = [ZERO] * n + [ONE] * m
    tab.run(phase1_cost, range(n + m))
    infeasibility = sum((tab.rows[i][-1] for i, v in enumerate(tab.basis) if v >= n), ZERO)
    if infeasibility > 0:
        # Optimal phase-1 duals w = c_B B^-1; B^-1 sits in the artificial columns.
        w = [
            sum((phase1_cost[tab.basis[k]] * tab.rows[k][n + i] for k in range(m)), ZERO)
            for i in range(m)
        ]
        y = [-signs[i] * w[i] for i in range(m)]
        yb = dot(y, b)
        y = tuple(x / -yb for x in y)
        cert = FarkasCertificate(y)
        assert verify_certificate(p, cert)
        return Infeasible(cert)

    # Drive artificial variables out of the basis; rows where that fails are redundant.
    for r in range(len(tab.rows) - 1, -1, -1):
        if tab.basis[r] >= n:
            col = next((j for j in range(n) if tab.rows[r][j] != 0), None)
            if col is None:
                del tab.rows[r]
                del tab.basis[r]
            else:
                tab.pivot(r, col)
    tab.rows = [row[:n] + [row[-1]] for row in tab.rows]

    if p.objective is None:
        x = _recombine(columns, tab.point(n), p.num_vars)
        return Feasible(x)

    cost = [-sign * p.objective[j] for j, sign in columns]
    unbounded_col = tab.run(cost, range(n))
    x = _recombine(columns, tab.point(n), p.num_vars)
    if unbounded_col is not None:
        d = [ZERO] * n
        d[unbounded_col] = ONE
        for i, bv in enumerate(tab.basis):
            d[bv] = -tab.rows[i][unbounded_col]
        return Unbounded(_recombine(columns, d, p.num_vars), x)
    return Feasible(x, dot(p.objective, x))


# ---------------------------------------------------------------------------
# Independent oracle


def basic_solutions(p: LpProblem):
    """Yield every basic feasible solution of the standard form, by exhaustive enumeration.

    This is deliberately naive and shares nothing with :func:`solve` beyond row
    reduction: every choice of ``rank`` columns is tried, solved directly and
    kept when nonnegative.
    """
    columns, a, b = _standard_form(p)
    n = len(columns)
    aug = [row + [rhs] for row, rhs in zip(a, b)]
    reduced, r, pivots = rref(aug) if aug else ((), 0, ())
    if pivots and pivots[-1] == n:
        return
    red = [list(row[:n]) for row in reduced[:r]]
    rhs = [row[n] for row in reduced[:r]]
    if r == 0:
        yield _recombine(columns, [ZERO] * n, p.num_vars)
        return
    for subset in combinations(range(n), r):
        sub = [[row[j] for j in subset] + [rhs[i]] for i, row in enumerate(red)]
        s_red, s_rank, s_piv = rref(sub)
        if s_piv != tuple(range(r)):
            continue
        vals = [s_red[i][r] for i in range(r)]
        if all(v >= 0 for v in vals):
            full = [ZERO] * n
            for j, v in zip(subset, vals):
                full[j] = v
            yield _recombine(columns, full, p.num_vars)


def brute_force_feasible(p: LpProblem) -> bool:
    return next(basic_solutions(p), None) is not None
