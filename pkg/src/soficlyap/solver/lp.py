"""Dense two-phase tableau simplex.

Problems are stated as::

    minimize    c @ x                 (optional; feasibility if c is None)
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                x >= lower            (lower may be -inf for free variables)

Entering columns are chosen by the most negative reduced cost.  After a run
of degenerate pivots the solver switches to Bland's rule for the rest of the
phase, which rules out cycling.  ``rule="bland"`` uses Bland's rule from the
first pivot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import InvalidInputError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"

FEAS_TOL = 1e-9
_PIVOT_TOL = 1e-11
_COST_TOL = 1e-11
_DEGENERATE_RUN = 12


@dataclass
class LPProblem:
    num_vars: int
    A_ub: np.ndarray = None
    b_ub: np.ndarray = None
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    lower: np.ndarray = None
    c: Optional[np.ndarray] = None
    maximize: bool = False

    def __post_init__(self):
        n = int(self.num_vars)
        self.num_vars = n

        def mat(a, b, what):
            a = np.zeros((0, n)) if a is None else np.atleast_2d(np.asarray(a, dtype=float))
            if a.size == 0:
                a = a.reshape(0, n)
            b = np.zeros(a.shape[0]) if b is None else np.asarray(b, dtype=float).reshape(-1)
            if a.shape[1] != n or b.shape[0] != a.shape[0]:
                raise InvalidInputError(f"{what} rows have inconsistent shape")
            if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
                raise InvalidInputError(f"{what} rows contain non-finite entries")
            return a, b

        self.A_ub, self.b_ub = mat(self.A_ub, self.b_ub, "inequality")
        self.A_eq, self.b_eq = mat(self.A_eq, self.b_eq, "equality")
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(n)
        if np.any(np.isnan(self.lower)) or np.any(self.lower == np.inf):
            raise InvalidInputError("lower bounds must be finite or -inf")
        if self.c is not None:
            self.c = np.asarray(self.c, dtype=float).reshape(n)

    @classmethod
    def from_rows(cls, num_vars: int, rows: Sequence, lower=None, c=None, maximize=False) -> "LPProblem":
        """Build from ``(coefficients, relation, rhs)`` triples, relation in ``<=, >=, ==``."""
        ub, bub, eq, beq = [], [], [], []
        for coef, rel, rhs in rows:
            coef = np.asarray(coef, dtype=float)
            if rel == "<=":
                ub.append(coef); bub.append(rhs)
            elif rel == ">=":
                ub.append(-coef); bub.append(-rhs)
            elif rel in ("==", "="):
                eq.append(coef); beq.append(rhs)
            else:
                raise InvalidInputError(f"unknown relation {rel!r}")
        return cls(num_vars, np.array(ub).reshape(-1, num_vars), np.array(bub),
                   np.array(eq).reshape(-1, num_vars), np.array(beq), lower, c, maximize)

    def residual(self, x) -> float:
        x = np.asarray(x, dtype=float)
        r = 0.0
        if self.A_ub.shape[0]:
            r = max(r, float(np.max(self.A_ub @ x - self.b_ub, initial=0.0)))
        if self.A_eq.shape[0]:
            r = max(r, float(np.max(np.abs(self.A_eq @ x - self.b_eq))))
        finite = np.isfinite(self.lower)
        if finite.any():
            r = max(r, float(np.max(self.lower[finite] - x[finite], initial=0.0)))
        return r


@dataclass
class LPResult:
    status: str
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    residual: Optional[float] = None
    iterations: int = 0
    phase1_value: Optional[float] = None

    @property
    def feasible(self) -> bool:
        return self.status in (OPTIMAL, UNBOUNDED) and self.x is not None


class _Tableau:
    def __init__(self, T, basis, allowed, rule):
        self.T = T
        self.basis = basis
        self.allowed = allowed
        self.rule = rule
        self.iterations = 0

    def pivot(self, r, c):
        T = self.T
        T[r] /= T[r, c]
        col = T[:, c].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = c

    def run(self, max_iter) -> str:
        T = self.T
        m = T.shape[0] - 1
        bland = self.rule == "bland"
        degenerate = 0
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            d = T[-1, :-1]
            cand = np.flatnonzero((d < -_COST_TOL) & self.allowed)
            if cand.size == 0:
                return OPTIMAL
            c = cand[0] if bland else cand[np.argmin(d[cand])]
            col = T[:m, c]
            pos = np.flatnonzero(col > _PIVOT_TOL)
            if pos.size == 0:
                return UNBOUNDED
            ratios = T[pos, -1] / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = ties[np.argmin(self.basis[ties])]
            if best <= 1e-12:
                degenerate += 1
                if degenerate >= _DEGENERATE_RUN:
                    bland = True
            else:
                degenerate = 0
            self.pivot(r, c)
            np.maximum(T[:m, -1], 0.0, out=T[:m, -1])
            self.iterations += 1

    def dual_run(self, max_iter) -> str:
        """Dual simplex: restore primal feasibility while keeping reduced costs >= 0."""
        T = self.T
        m = T.shape[0] - 1
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            rhs = T[:m, -1]
            r = int(np.argmin(rhs))
            if rhs[r] >= -1e-12:
                np.maximum(T[:m, -1], 0.0, out=T[:m, -1])
                return OPTIMAL
            row = T[r, :-1]
            cand = np.flatnonzero((row < -_PIVOT_TOL) & self.allowed)
            if cand.size == 0:
                return INFEASIBLE
            d = np.maximum(T[-1, cand], 0.0)
            ratios = d / -row[cand]
            c = cand[np.argmin(ratios)]
            self.pivot(r, c)
            self.iterations += 1


def lp_solve(problem: LPProblem, rule: str = "dantzig", max_iter: Optional[int] = None) -> LPResult:
    """Solve ``problem``; see the module docstring for the pivoting rules."""
    return _Solver(problem, rule, max_iter).result


class _Solver:
    """Standardized tableau of one problem, kept after solving so rows can be added."""

    def __init__(self, problem: LPProblem, rule: str, max_iter: Optional[int]):
        if rule not in ("dantzig", "bland"):
            raise InvalidInputError(f"unknown pivot rule {rule!r}")
        p = self.problem = problem
        self.rule = rule
        n = p.num_vars
        free = ~np.isfinite(p.lower)
        self.shift = np.where(free, 0.0, p.lower)
        # columns: one per variable, an extra (negative part) per free variable
        self.free_idx = free_idx = np.flatnonzero(free)
        self.ncols_x = ncols_x = n + free_idx.size
        self.max_iter = max_iter
        self.tab = None

        A_ub = self.expand(p.A_ub)
        b_ub = p.b_ub - p.A_ub @ self.shift
        A_eq = self.expand(p.A_eq)
        b_eq = p.b_eq - p.A_eq @ self.shift
        m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
        m = m_ub + m_eq

        neg_ub = b_ub < 0
        sign_ub = np.where(neg_ub, -1.0, 1.0)
        sign_eq = np.where(b_eq < 0, -1.0, 1.0)
        art_rows = np.concatenate([np.flatnonzero(neg_ub), m_ub + np.arange(m_eq)])
        n_art = art_rows.size
        N = ncols_x + m_ub + n_art

        T = np.zeros((m + 1, N + 1))
        T[:m_ub, :ncols_x] = A_ub * sign_ub[:, None]
        T[:m_ub, ncols_x:ncols_x + m_ub] = np.diag(sign_ub)
        T[:m_ub, -1] = b_ub * sign_ub
        T[m_ub:m, :ncols_x] = A_eq * sign_eq[:, None]
        T[m_ub:m, -1] = b_eq * sign_eq
        basis = np.empty(m, dtype=int)
        basis[:m_ub] = ncols_x + np.arange(m_ub)
        art0 = ncols_x + m_ub
        for a, r in enumerate(art_rows):
            T[r, art0 + a] = 1.0
            basis[r] = art0 + a
        is_art = np.zeros(N, dtype=bool)
        is_art[art0:] = True

        limit = 50 * (m + N) + 100 if max_iter is None else max_iter
        tab = _Tableau(T, basis, np.ones(N, dtype=bool), rule)

        phase1 = 0.0
        if n_art:
            T[-1, :] = -T[art_rows, :].sum(axis=0)
            T[-1, art0:N] = 0.0
            status = tab.run(limit)
            if status == ITERATION_LIMIT:
                self.result = LPResult(ITERATION_LIMIT, iterations=tab.iterations)
                return
            phase1 = -T[-1, -1]
            if phase1 > FEAS_TOL:
                self.result = LPResult(INFEASIBLE, iterations=tab.iterations, phase1_value=float(phase1))
                return
            # drive remaining artificial variables out of the basis
            keep = np.ones(m + 1, dtype=bool)
            for r in range(m):
                if is_art[basis[r]]:
                    cand = np.flatnonzero((np.abs(T[r, :N]) > 1e-9) & ~is_art)
                    if cand.size:
                        tab.pivot(r, cand[0])
                    else:
                        keep[r] = False
            # artificial columns are the trailing block; drop them
            T = np.hstack([T[keep, :art0], T[keep, -1:]])
            tab.T, tab.basis = T, basis[keep[:-1]]
        self.N = art0
        tab.allowed = np.ones(art0, dtype=bool)
        self.tab = tab
        self.phase1 = float(phase1)

        cost = np.zeros(art0)
        if p.c is not None:
            cx = -p.c if p.maximize else p.c
            cost[:n] = cx
            cost[n:ncols_x] = -cx[free_idx]
        self.cost = cost
        T, basis, m = tab.T, tab.basis, tab.T.shape[0] - 1
        T[-1, :-1] = cost - cost[basis] @ T[:m, :-1]
        T[-1, -1] = -cost[basis] @ T[:m, -1]
        status = tab.run(limit) if p.c is not None else OPTIMAL
        self.result = self._finish(status)

    def expand(self, a):
        return np.hstack([a, -a[:, self.free_idx]]) if self.free_idx.size else a

    def _finish(self, status) -> LPResult:
        tab = self.tab
        if status in (ITERATION_LIMIT, INFEASIBLE):
            return LPResult(status, iterations=tab.iterations, phase1_value=self.phase1)
        T, basis = tab.T, tab.basis
        m = T.shape[0] - 1
        z = np.zeros(T.shape[1] - 1)
        z[basis] = T[:m, -1]
        n = self.problem.num_vars
        x = z[:n].copy()
        if self.free_idx.size:
            x[self.free_idx] -= z[n:self.ncols_x]
        x += self.shift
        p = self.problem
        value = None if p.c is None else float(p.c @ x)
        return LPResult(status, x, value, p.residual(x), tab.iterations, self.phase1)

    def add_rows(self, A, b) -> LPResult:
        """Append ``A @ x <= b`` and re-optimize from the current basis."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        p = self.problem
        p.A_ub = np.vstack([p.A_ub, A])
        p.b_ub = np.concatenate([p.b_ub, b])
        tab = self.tab
        T, basis = tab.T, tab.basis
        m, width = T.shape[0] - 1, T.shape[1] - 1
        k = A.shape[0]
        new = np.zeros((m + k + 1, width + k + 1))
        new[:m, :width] = T[:m, :-1]
        new[:m, -1] = T[:m, -1]
        new[-1, :width] = T[-1, :-1]
        new[-1, -1] = T[-1, -1]
        rows = np.zeros((k, width + k + 1))
        rows[:, :self.ncols_x] = self.expand(A)
        rows[:, width:width + k] = np.eye(k)
        rows[:, -1] = b - A @ self.shift
        # eliminate the current basic columns from the new rows
        rows -= rows[:, basis] @ new[:m]
        new[m:m + k] = rows
        tab.T = new
        tab.basis = np.concatenate([basis, width + np.arange(k)])
        tab.allowed = np.ones(width + k, dtype=bool)
        limit = 50 * (m + k + width) + 100 if self.max_iter is None else self.max_iter
        tab.iterations = 0
        status = tab.dual_run(limit)
        if status == OPTIMAL and p.c is not None:
            status = tab.run(limit)
        self.result = self._finish(status)
        return self.result


class IncrementalLP:
    """An LP that accepts extra ``<=`` rows after it has been solved.

    New rows keep the previous basis dual feasible, so a few dual simplex
    pivots usually restore optimality.  Once the problem is infeasible it
    stays infeasible.  After an unbounded answer the grown problem is
    solved cold.
    """

    def __init__(self, problem: LPProblem, rule: str = "dantzig", max_iter: Optional[int] = None):
        p = problem
        own = LPProblem(p.num_vars, p.A_ub.copy(), p.b_ub.copy(), p.A_eq.copy(), p.b_eq.copy(),
                        p.lower.copy(), None if p.c is None else p.c.copy(), p.maximize)
        self._solver = _Solver(own, rule, max_iter)

    @property
    def result(self) -> LPResult:
        return self._solver.result

    @property
    def problem(self) -> LPProblem:
        return self._solver.problem

    def add_rows(self, A, b) -> LPResult:
        if self._solver.tab is None or self.result.status in (INFEASIBLE, ITERATION_LIMIT):
            return self.result
        if self.result.status == UNBOUNDED:
            # the basis is not dual feasible; solve the grown problem from scratch
            p = self.problem
            A = np.atleast_2d(np.asarray(A, dtype=float))
            grown = LPProblem(p.num_vars, np.vstack([p.A_ub, A]),
                              np.concatenate([p.b_ub, np.asarray(b, dtype=float).reshape(-1)]),
                              p.A_eq, p.b_eq, p.lower, p.c, p.maximize)
            self._solver = _Solver(grown, self._solver.rule, self._solver.max_iter)
            return self.result
        return self._solver.add_rows(A, b)
