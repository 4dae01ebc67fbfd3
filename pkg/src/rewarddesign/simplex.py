"""Dense two-phase simplex: Dantzig entering, lexicographic leaving.

Self-contained so design fixtures are deterministic: identical inputs take
identical pivot sequences and return bitwise-identical solutions.  Problem
sizes here are small (variables = |S||A| + 1, constraints at most a few
hundred), so no sparsity or factorization updates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MalformedProgram
from .tolerances import DEFAULT, Tolerances

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"


@dataclass
class LinearProgram:
    """Maximize c.x  s.t.  A_ub.x <= b_ub,  A_eq.x = b_eq,  lower <= x <= upper."""

    objective: np.ndarray
    ineq_lhs: np.ndarray = None
    ineq_rhs: np.ndarray = None
    eq_lhs: np.ndarray = None
    eq_rhs: np.ndarray = None
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.objective, dtype=float))
        n = c.shape[0]
        self.objective = c
        if self.ineq_lhs is None:
            self.ineq_lhs = np.zeros((0, n))
            self.ineq_rhs = np.zeros(0)
        else:
            self.ineq_lhs = np.atleast_2d(np.asarray(self.ineq_lhs, dtype=float))
            self.ineq_rhs = np.atleast_1d(np.asarray(self.ineq_rhs, dtype=float))
        if self.eq_lhs is None:
            self.eq_lhs = np.zeros((0, n))
            self.eq_rhs = np.zeros(0)
        else:
            self.eq_lhs = np.atleast_2d(np.asarray(self.eq_lhs, dtype=float))
            self.eq_rhs = np.atleast_1d(np.asarray(self.eq_rhs, dtype=float))
        self.lower = np.full(n, -np.inf) if self.lower is None else np.asarray(self.lower, dtype=float)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    def validate(self) -> None:
        n = self.n_vars
        for name, arr, width in (
            ("ineq_lhs", self.ineq_lhs, n),
            ("eq_lhs", self.eq_lhs, n),
        ):
            if arr.ndim != 2 or arr.shape[1] != width:
                raise MalformedProgram(f"{name} must have {width} columns, got shape {arr.shape}")
            if not np.isfinite(arr).all():
                raise MalformedProgram(f"{name} contains non-finite entries")
        if self.ineq_rhs.shape[0] != self.ineq_lhs.shape[0]:
            raise MalformedProgram("ineq_rhs length mismatch")
        if self.eq_rhs.shape[0] != self.eq_lhs.shape[0]:
            raise MalformedProgram("eq_rhs length mismatch")
        for name, vec in (("objective", self.objective), ("ineq_rhs", self.ineq_rhs), ("eq_rhs", self.eq_rhs)):
            if not np.isfinite(vec).all():
                raise MalformedProgram(f"{name} contains non-finite entries")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise MalformedProgram("bound vectors must match variable count")
        if np.isnan(self.lower).any() or np.isnan(self.upper).any():
            raise MalformedProgram("bounds contain NaN")
        if (self.lower > self.upper).any():
            raise MalformedProgram("lower bound exceeds upper bound")

    def dump(self) -> str:
        """Plain-text form: objective, then one constraint per line."""
        lines = ["max " + " ".join(repr(v) for v in self.objective)]
        for row, b in zip(self.ineq_lhs, self.ineq_rhs):
            lines.append(" ".join(repr(v) for v in row) + f" <= {b!r}")
        for row, b in zip(self.eq_lhs, self.eq_rhs):
            lines.append(" ".join(repr(v) for v in row) + f" = {b!r}")
        for j in range(self.n_vars):
            lines.append(f"x{j} in [{self.lower[j]!r}, {self.upper[j]!r}]")
        return "\n".join(lines) + "\n"


@dataclass
class LpSolution:
    status: str
    x: Optional[np.ndarray] = None
    objective_value: Optional[float] = None
    iterations: int = 0


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    basis[row] = col


def _run_simplex(tableau, basis, cost, tol: Tolerances, max_iter: int):
    """Minimize cost over the tableau's feasible region.

    Returns (status, iterations, reduced costs).  Entering variable by most
    negative reduced cost, leaving row by a lexicographic ratio test.
    """
    n = tableau.shape[1] - 1
    iters = 0
    m = tableau.shape[0]
    # Lexicographic anti-cycling: the columns basic at phase entry act as
    # the reference block (B^{-1} relative to that basis is the identity, so
    # every row starts lexicographically positive and stays that way).
    ref = [n] + list(basis)
    # The lexicographic rule rules out cycling in exact arithmetic but can
    # still loop under roundoff; a long run of pivots with no objective
    # movement is reported so callers can perturb and retry.
    stall_limit = max(500, 5 * m)
    stalled = 0
    best_obj = np.inf
    while True:
        # Recompute reduced costs from scratch each pivot; the incremental
        # update drifts over long degenerate runs.
        z = np.append(cost, 0.0) - cost[basis] @ tableau
        negative = np.nonzero(z[:n] < -tol.lp_pivot)[0]
        if negative.size == 0:
            return OPTIMAL, iters, z
        entering = int(negative[np.argmin(z[negative])])  # most negative
        col = tableau[:, entering]
        candidates = np.nonzero(col > tol.lp_pivot)[0]
        if candidates.size == 0:
            return UNBOUNDED, iters, z
        # lexicographic ratio test over (rhs, reference columns) / pivot col
        remaining = candidates
        for j in ref:
            vals = tableau[remaining, j] / col[remaining]
            remaining = remaining[vals == vals.min()]
            if remaining.size == 1:
                break
        leave = int(remaining[np.argmin(basis[remaining])])
        _pivot(tableau, basis, leave, entering)
        iters += 1
        obj = float(cost[basis] @ tableau[:, -1])
        if obj < best_obj - 1e-12 * max(1.0, abs(best_obj)):
            best_obj = obj
            stalled = 0
        else:
            stalled += 1
            if stalled > stall_limit:
                raise MalformedProgram(
                    f"simplex stalled for {stalled} iterations (degenerate cycle)"
                )
        if iters > max_iter:
            raise MalformedProgram(f"simplex exceeded {max_iter} iterations")


def solve(lp: LinearProgram, tol: Tolerances = DEFAULT, max_iter: int = 100_000) -> LpSolution:
    """Solve the LP; returns Optimal with a vertex solution, Infeasible, or Unbounded."""
    lp.validate()
    n = lp.n_vars

    # Substitute variables so everything is y >= 0.
    # x_j = lower_j + y_k                     (finite lower)
    # x_j = upper_j - y_k                     (lower = -inf, finite upper)
    # x_j = y_k - y_{k+1}                     (both infinite)
    cols = []        # (j, sign, offset) per y column
    extra_rows = []  # (y_col, cap) upper-bound rows for doubly bounded vars
    for j in range(n):
        lo, up = lp.lower[j], lp.upper[j]
        if np.isfinite(lo):
            cols.append((j, 1.0, lo))
            if np.isfinite(up):
                extra_rows.append((len(cols) - 1, up - lo))
        elif np.isfinite(up):
            cols.append((j, -1.0, up))
        else:
            cols.append((j, 1.0, 0.0))
            cols.append((j, -1.0, 0.0))
    ny = len(cols)

    def expand(mat_row):
        out = np.zeros(ny)
        for k, (j, sign, _) in enumerate(cols):
            out[k] = sign * mat_row[j]
        return out

    offset_x = np.zeros(n)
    for j, sign, off in cols:
        offset_x[j] += off
    obj_shift = float(lp.objective @ offset_x)

    a_ub = [expand(row) for row in lp.ineq_lhs]
    b_ub = [b - float(row @ offset_x) for row, b in zip(lp.ineq_lhs, lp.ineq_rhs)]
    for k, cap in extra_rows:
        row = np.zeros(ny)
        row[k] = 1.0
        a_ub.append(row)
        b_ub.append(cap)
    a_eq = [expand(row) for row in lp.eq_lhs]
    b_eq = [b - float(row @ offset_x) for row, b in zip(lp.eq_lhs, lp.eq_rhs)]

    m_ub, m_eq = len(a_ub), len(a_eq)
    m = m_ub + m_eq
    c_y = expand(lp.objective)

    # Columns: y (ny), slacks (m_ub), artificials (only the rows that need
    # one: equalities, and <= rows with a negative right-hand side).
    needs_art = [False] * m
    for i in range(m_ub):
        needs_art[i] = b_ub[i] < 0.0
    for i in range(m_eq):
        needs_art[m_ub + i] = True
    n_art = sum(needs_art)
    total = ny + m_ub + n_art
    tableau = np.zeros((m, total + 1))
    basis = np.zeros(m, dtype=int)
    for i in range(m_ub):
        tableau[i, :ny] = a_ub[i]
        tableau[i, ny + i] = 1.0
        tableau[i, -1] = b_ub[i]
    for i in range(m_eq):
        tableau[m_ub + i, :ny] = a_eq[i]
        tableau[m_ub + i, -1] = b_eq[i]
    art = 0
    for i in range(m):
        if not needs_art[i]:
            basis[i] = ny + i  # slack starts basic
            continue
        if tableau[i, -1] < 0.0:
            tableau[i] *= -1.0
        tableau[i, ny + m_ub + art] = 1.0
        basis[i] = ny + m_ub + art
        art += 1

    it1 = 0
    if n_art:
        # Phase 1: minimize artificial sum.
        phase1_cost = np.zeros(total)
        phase1_cost[ny + m_ub:] = 1.0
        status, it1, _ = _run_simplex(tableau, basis, phase1_cost, tol, max_iter)
        if status == UNBOUNDED:
            raise MalformedProgram("phase-1 problem cannot be unbounded")
        art_value = sum(tableau[i, -1] for i in range(m) if basis[i] >= ny + m_ub)
        if art_value > tol.lp_feasibility:
            return LpSolution(INFEASIBLE, iterations=it1)

        # Drive residual artificials out of the basis; drop redundant rows.
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= ny + m_ub:
                pivot_col = -1
                for j in range(ny + m_ub):
                    if abs(tableau[i, j]) > tol.lp_pivot:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(tableau, basis, i, pivot_col)
                else:
                    keep[i] = False
        if not keep.all():
            tableau = tableau[keep]
            basis = basis[keep]
            m = basis.shape[0]
        # Forbid artificial columns from re-entering.
        tableau = np.delete(tableau, np.s_[ny + m_ub:total], axis=1)

    # Phase 2: maximize c_y . y == minimize -c_y . y.
    phase2_cost = np.zeros(ny + m_ub)
    phase2_cost[:ny] = -c_y
    status, it2, _ = _run_simplex(tableau, basis, phase2_cost, tol, max_iter)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=it1 + it2)

    y = np.zeros(ny + m_ub)
    for i in range(m):
        y[basis[i]] = tableau[i, -1]
    x = offset_x.copy()
    for k, (j, sign, _) in enumerate(cols):
        x[j] += sign * y[k]
    return LpSolution(OPTIMAL, x=x, objective_value=float(lp.objective @ x), iterations=it1 + it2)
