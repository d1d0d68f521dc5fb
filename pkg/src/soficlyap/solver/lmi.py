"""LMI feasibility through eigenvector cuts over a linear master problem.

Each block must satisfy ``F(x) >= 0``.  For a unit vector ``u`` the
inequality ``u^T F(x) u >= 0`` is linear in ``x`` and valid for every
feasible point, so infeasibility of the accumulated cuts proves
infeasibility of the LMI.  The master maximizes a common lower bound ``t``
on all cut values (capped at 1, with the normalization rows of the
constraint system keeping the scale fixed)::

    max t  s.t.  t <= u^T F_b(x) u  for all stored (b, u),  linear rows,  t <= 1

If ``t* < 0`` the LMI is infeasible.  Otherwise the eigenvectors of
negative eigenvalues at the master point become new cuts, until every
block is positive semidefinite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .eigen import symmetric_eigen
from .lp import INFEASIBLE, ITERATION_LIMIT, IncrementalLP, LPProblem

FEASIBLE = "feasible"
INCONCLUSIVE = "inconclusive"


def initial_directions(m: int) -> list:
    """Coordinate vectors and the normalized pairwise sums and differences."""
    eye = np.eye(m)
    dirs = [eye[i] for i in range(m)]
    for i, j in itertools.combinations(range(m), 2):
        dirs.append((eye[i] + eye[j]) / np.sqrt(2.0))
        dirs.append((eye[i] - eye[j]) / np.sqrt(2.0))
    return dirs


class CutPool:
    """Cut directions per block key.

    Block keys are stable across decay rates, so a pool can be shared by a
    whole bisection run: a direction that separated at one rate is usually
    informative at the next one.
    """

    def __init__(self, keep: Optional[int] = 8):
        self.keep = keep
        self._dirs: dict = {}
        self._base: dict = {}

    def directions(self, block) -> list:
        """Seed directions for a new solve: the initial set plus the ``keep``
        most recent separating directions."""
        key = block.key
        if key not in self._dirs:
            self._base[key] = initial_directions(block.const.shape[0])
            self._dirs[key] = []
        elif self.keep is not None:
            del self._dirs[key][:-self.keep or len(self._dirs[key])]
        return self._base[key] + self._dirs[key]

    def add(self, block, u):
        self._dirs[block.key].append(np.array(u, dtype=float))

    def __len__(self):
        return sum(len(v) for v in self._dirs.values())


@dataclass
class LMIResult:
    status: str
    x: Optional[np.ndarray] = None
    t: Optional[float] = None
    iterations: int = 0
    cuts: int = 0
    min_eigenvalue: Optional[float] = None
    lp_solves: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def lmi_feasible(system, tol: float = 0.0, max_cuts: int = 2000, max_iter: int = 100,
                 pool: Optional[CutPool] = None) -> LMIResult:
    """Decide ``F_b(x) >= tol * I`` for all blocks of ``system`` plus its linear rows.

    Returns status ``feasible`` with a verified point, ``infeasible`` when the
    accumulated cuts are contradictory, or ``inconclusive`` when the cut or
    iteration budget runs out.
    """
    pool = CutPool() if pool is None else pool
    blocks = system.lmi_blocks
    nv = system.num_vars
    ncol = nv + 1

    base_rows = [np.hstack([system.A_ub, np.zeros((system.A_ub.shape[0], 1))])]
    base_rhs = [system.b_ub]
    cap = np.zeros((1, ncol))
    cap[0, -1] = 1.0
    base_rows.append(cap)
    base_rhs.append(np.ones(1))
    A_eq = np.hstack([system.A_eq, np.zeros((system.A_eq.shape[0], 1))])
    lower = np.append(system.lower, -np.inf)
    c = np.zeros(ncol)
    c[-1] = 1.0

    def cut_row(block, u):
        g, g0 = block.cut(u)
        row = np.zeros(ncol)
        row[block.var_idx] -= g  # indices are unique within a block
        row[-1] = 1.0
        return row, g0 - tol

    cut_rows, cut_rhs = [], []
    for b in blocks:
        for u in pool.directions(b):
            r, h = cut_row(b, u)
            cut_rows.append(r)
            cut_rhs.append(h)

    A_ub = np.vstack(base_rows + [np.array(cut_rows).reshape(-1, ncol)])
    b_ub = np.concatenate(base_rhs + [np.array(cut_rhs)])
    master = IncrementalLP(LPProblem(ncol, A_ub, b_ub, A_eq, system.b_eq, lower, c, maximize=True))
    res = master.result
    ncuts = len(cut_rows)
    x = t = worst = None
    for it in range(max_iter):
        if res.status == INFEASIBLE:
            return LMIResult(INFEASIBLE, iterations=it + 1, cuts=ncuts, lp_solves=it + 1)
        if res.status == ITERATION_LIMIT or res.x is None:
            return LMIResult(INCONCLUSIVE, iterations=it + 1, cuts=ncuts, lp_solves=it + 1)
        x, t = res.x[:-1], res.x[-1]
        if t < 0:
            return LMIResult(INFEASIBLE, x, float(t), it + 1, ncuts, None, it + 1)
        worst = np.inf
        new_rows, new_rhs = [], []
        for b in blocks:
            w, V = symmetric_eigen(b.value(x))
            worst = min(worst, w[0] - tol)
            for lam, u in zip(w, V.T):
                if lam < tol:
                    pool.add(b, u)
                    r, h = cut_row(b, u)
                    new_rows.append(r)
                    new_rhs.append(h)
        if worst >= 0:
            return LMIResult(FEASIBLE, x, float(t), it + 1, ncuts, float(worst + tol), it + 1)
        if not new_rows or ncuts + len(new_rows) > max_cuts:
            break
        ncuts += len(new_rows)
        res = master.add_rows(np.array(new_rows), np.array(new_rhs))
    return LMIResult(INCONCLUSIVE, x, None if t is None else float(t), max_iter, ncuts,
                     None if worst is None else float(worst + tol), max_iter)
