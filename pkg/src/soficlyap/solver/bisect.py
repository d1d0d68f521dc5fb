"""Bisection on the decay rate: upper bounds on the constrained JSR."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..debruijn import DeBruijnGraph
from ..errors import NoCertificateError, InvalidInputError
from ..shift import LabeledGraph
from ..system import SwitchedSystem
from ..templates import Certificate, Template, TemplateKind, encode
from .lmi import FEASIBLE, INCONCLUSIVE, CutPool, lmi_feasible
from .lp import LPProblem, lp_solve

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-4
MAX_ITER = 60
MAX_DOUBLINGS = 6


@dataclass
class BisectionReport:
    graph_id: str
    template: str
    rho_upper: float
    rho_lower: float
    certificate: Certificate
    iterations: int
    tolerance: float
    trace: list = field(default_factory=list)  # (gamma, status)
    inconclusive: int = 0

    @property
    def gap(self) -> float:
        return self.rho_upper - self.rho_lower


@dataclass
class FeasibilityResult:
    status: str
    certificate: Optional[Certificate] = None

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def check_gamma(system: SwitchedSystem, graph: LabeledGraph, template: Template, gamma: float,
                margin: Optional[float] = None, pool: Optional[CutPool] = None,
                graph_id: Optional[str] = None) -> FeasibilityResult:
    """Search for a certificate at one decay rate."""
    cs = encode(system, graph, template, gamma, margin)
    if template.kind.is_lp:
        res = lp_solve(LPProblem(cs.num_vars, cs.A_ub, cs.b_ub, cs.A_eq, cs.b_eq, cs.lower))
        if not res.feasible:
            return FeasibilityResult(res.status)
        x = np.maximum(res.x, cs.lower)
        return FeasibilityResult(FEASIBLE, cs.to_certificate(x, graph_id))
    res = lmi_feasible(cs, pool=pool)
    if res.status == INCONCLUSIVE and pool is not None and len(pool):
        # stale directions from other rates can stall the cutting planes
        res = lmi_feasible(cs)
    if not res.feasible:
        return FeasibilityResult(res.status)
    return FeasibilityResult(FEASIBLE, cs.to_certificate(res.x, graph_id))


def _graph_and_id(graph: Union[LabeledGraph, DeBruijnGraph], graph_id: Optional[str]) -> tuple:
    if isinstance(graph, DeBruijnGraph):
        return graph.graph, graph_id or graph.graph_id
    return graph, graph_id or "explicit"


def rho_upper(system: SwitchedSystem, graph: Union[LabeledGraph, DeBruijnGraph], template,
              tol: float = DEFAULT_TOL, lower: Optional[float] = None, margin: Optional[float] = None,
              graph_id: Optional[str] = None, lower_len: int = 8, max_iter: int = MAX_ITER,
              reuse_cuts: bool = True) -> BisectionReport:
    """Smallest certified decay rate, up to ``tol``.

    The bracket starts at ``[lower, max_i |A(i)|_inf (1 + tol)]``, where
    ``lower`` defaults to the cycle bound of :func:`soficlyap.jsr.rho_lower`.
    The upper end is doubled (at most ``MAX_DOUBLINGS`` times) until a
    certificate exists.  ``lower + tol`` is probed before bisecting.
    Inconclusive LMI answers count as infeasible.
    """
    if not tol > 0:
        raise InvalidInputError("tolerance must be positive")
    g, gid = _graph_and_id(graph, graph_id)
    template = template if isinstance(template, Template) else Template(TemplateKind.parse(template), system.dimension)
    if lower is None:
        from ..jsr import rho_lower
        lower = rho_lower(system, lower_len)
    pool = CutPool() if reuse_cuts else None
    trace = []
    inconclusive = 0

    def probe(gamma):
        nonlocal inconclusive
        r = check_gamma(system, g, template, gamma, margin, pool, gid)
        trace.append((float(gamma), r.status))
        if r.status == INCONCLUSIVE:
            inconclusive += 1
            log.warning("inconclusive LMI at gamma=%.6g on %s; treated as infeasible", gamma, gid)
        return r

    hi = max(float(np.abs(a).sum(axis=1).max()) for a in system.matrices.values()) * (1 + tol)
    hi = max(hi, tol)
    best = probe(hi)
    doublings = 0
    while not best.feasible:
        if doublings == MAX_DOUBLINGS:
            raise NoCertificateError(f"no {template.kind.value} certificate on {gid} up to gamma={hi:.6g}")
        hi *= 2
        doublings += 1
        best = probe(hi)

    lo = float(lower)
    iterations = 0
    if lo + tol < hi:
        r = probe(lo + tol)
        if r.feasible:
            hi, best = lo + tol, r
        else:
            lo = lo + tol
            while hi - lo > tol and iterations < max_iter:
                mid = 0.5 * (lo + hi)
                r = probe(mid)
                iterations += 1
                if r.feasible:
                    hi, best = mid, r
                else:
                    lo = mid
    return BisectionReport(gid, template.kind.value, float(hi), float(lower), best.certificate,
                           iterations, float(tol), trace, inconclusive)
