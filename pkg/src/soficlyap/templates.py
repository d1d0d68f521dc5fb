"""Lyapunov templates attached to the nodes of a graph.

An edge ``(C, D, h)`` asks for ``W(A(h) x, D) <= gamma * W(x, C)``.  The
four kinds and their edge conditions:

===================  ==============================  ==========================================
kind                 ``W(x, C)``                     edge condition
===================  ==============================  ==========================================
copositive-linear    ``v_C @ |x|``                   ``A^T v_D <= gamma v_C``
weighted-linf        ``max_i |x_i| / v_C[i]``        ``A v_C <= gamma v_D``
diagonal-quadratic   ``sqrt(x^T diag(v_C) x)``       ``gamma^2 diag(v_C) - A^T diag(v_D) A >= 0``
full-quadratic       ``sqrt(x^T Q_C x)``             ``gamma^2 Q_C - A^T Q_D A >= 0``
===================  ==============================  ==========================================

The two vector conditions are stated for nonnegative ``A``.  With ``|A|``
in place of ``A`` they are exact for arbitrary signs, which is what the
exact validator uses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import InvalidCertificateError, InvalidInputError, TemplateMismatchError
from .shift import LabeledGraph, transpose
from .solver.eigen import symmetric_eigen
from .system import SwitchedSystem

EPSILON = 1e-6
LMI_MARGIN = 1e-7
LP_MARGIN = 0.0
VALIDATION_TOL = 1e-9


class TemplateKind(str, enum.Enum):
    COPOSITIVE_LINEAR = "copositive-linear"
    WEIGHTED_LINF = "weighted-linf"
    DIAGONAL_QUADRATIC = "diagonal-quadratic"
    FULL_QUADRATIC = "full-quadratic"

    @property
    def is_vector(self) -> bool:
        return self is not TemplateKind.FULL_QUADRATIC

    @property
    def is_lp(self) -> bool:
        return self in (TemplateKind.COPOSITIVE_LINEAR, TemplateKind.WEIGHTED_LINF)

    @property
    def dual(self) -> "TemplateKind":
        return _DUAL_KIND[self]

    @classmethod
    def parse(cls, value) -> "TemplateKind":
        if isinstance(value, cls):
            return value
        aliases = {"copositive": cls.COPOSITIVE_LINEAR, "linf": cls.WEIGHTED_LINF,
                   "weighted-l-inf": cls.WEIGHTED_LINF, "diagonal": cls.DIAGONAL_QUADRATIC,
                   "quadratic": cls.FULL_QUADRATIC}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise InvalidInputError(f"unknown template kind {value!r}") from None


_DUAL_KIND = {
    TemplateKind.COPOSITIVE_LINEAR: TemplateKind.WEIGHTED_LINF,
    TemplateKind.WEIGHTED_LINF: TemplateKind.COPOSITIVE_LINEAR,
    TemplateKind.DIAGONAL_QUADRATIC: TemplateKind.DIAGONAL_QUADRATIC,
    TemplateKind.FULL_QUADRATIC: TemplateKind.FULL_QUADRATIC,
}


@dataclass(frozen=True)
class Template:
    kind: TemplateKind
    dimension: int

    def __post_init__(self):
        object.__setattr__(self, "kind", TemplateKind.parse(self.kind))
        if self.dimension < 1:
            raise InvalidInputError("template dimension must be >= 1")

    @property
    def params_per_node(self) -> int:
        n = self.dimension
        return n if self.kind.is_vector else n * (n + 1) // 2

    def check_param(self, param) -> np.ndarray:
        """Return ``param`` as an array after checking shape and strict positivity."""
        p = np.asarray(param, dtype=float)
        n = self.dimension
        if self.kind.is_vector:
            if p.shape != (n,):
                raise InvalidCertificateError(f"expected a vector of length {n}, got shape {p.shape}")
            if not np.all(p > 0):
                raise InvalidCertificateError("template vector must be entrywise positive")
        else:
            if p.shape != (n, n):
                raise InvalidCertificateError(f"expected an {n}x{n} matrix, got shape {p.shape}")
            if not np.allclose(p, p.T, rtol=0, atol=1e-12 * max(1.0, np.abs(p).max())):
                raise InvalidCertificateError("template matrix must be symmetric")
            if symmetric_eigen(p)[0][0] <= 0:
                raise InvalidCertificateError("template matrix must be positive definite")
        return p

    def gram(self, param) -> np.ndarray:
        """Quadratic-form matrix of a quadratic template parameter."""
        p = np.asarray(param, dtype=float)
        if self.kind is TemplateKind.DIAGONAL_QUADRATIC:
            return np.diag(p)
        if self.kind is TemplateKind.FULL_QUADRATIC:
            return 0.5 * (p + p.T)
        raise InvalidInputError(f"{self.kind.value} has no quadratic form")


def evaluate(template: Template, param, x) -> float:
    p = template.check_param(param)
    x = np.asarray(x, dtype=float)
    kind = template.kind
    if kind is TemplateKind.COPOSITIVE_LINEAR:
        return float(p @ np.abs(x))
    if kind is TemplateKind.WEIGHTED_LINF:
        return float(np.max(np.abs(x) / p))
    return float(np.sqrt(max(x @ template.gram(p) @ x, 0.0)))


# --- certificates ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Certificate:
    """Node-indexed template parameters together with a decay rate.

    ``margins`` are ``(M1, M2)``.  For quadratic kinds they bound the
    parameter matrices, ``M1 I <= Q <= M2 I``.  For copositive-linear and
    weighted-linf they are the constants in ``M1 |x|_2 <= W(x, C) <= M2 |x|_2``.
    """

    template: Template
    params: Mapping
    gamma: float
    graph_id: Optional[str] = None
    margins: tuple = field(default=None)

    def __post_init__(self):
        if not self.params:
            raise InvalidCertificateError("certificate has no parameters")
        params = {s: self.template.check_param(p).copy() for s, p in self.params.items()}
        for p in params.values():
            p.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "gamma", float(self.gamma))
        if not self.gamma > 0:
            raise InvalidCertificateError("gamma must be positive")
        if self.margins is None:
            object.__setattr__(self, "margins", _margins(self.template, params.values()))

    @property
    def norm_bounds(self) -> tuple:
        """``(c1, c2)`` with ``c1 |x|_2 <= W(x, C) <= c2 |x|_2`` for every node."""
        if self.template.kind.is_lp:
            return self.margins
        m1, m2 = self.margins
        return float(np.sqrt(m1)), float(np.sqrt(m2))

    def with_gamma(self, gamma: float) -> "Certificate":
        return Certificate(self.template, self.params, gamma, self.graph_id)

    def value(self, node, x) -> float:
        return evaluate(self.template, self.params[node], x)


def _margins(template: Template, params) -> tuple:
    kind = template.kind
    params = list(params)
    if kind is TemplateKind.COPOSITIVE_LINEAR:
        return (float(min(p.min() for p in params)), float(max(np.linalg.norm(p) for p in params)))
    if kind is TemplateKind.WEIGHTED_LINF:
        return (float(min(1.0 / np.linalg.norm(p) for p in params)), float(max(1.0 / p.min() for p in params)))
    if kind is TemplateKind.DIAGONAL_QUADRATIC:
        return (float(min(p.min() for p in params)), float(max(p.max() for p in params)))
    eig = [symmetric_eigen(p)[0] for p in params]
    return (float(min(w[0] for w in eig)), float(max(w[-1] for w in eig)))


# --- constraint systems ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class LMIBlock:
    """Affine symmetric constraint ``const + sum_j x[var_idx[j]] * coeffs[j] >= 0``.

    Any margin is already folded into ``const``.
    """

    key: tuple
    var_idx: np.ndarray
    coeffs: np.ndarray  # (len(var_idx), m, m)
    const: np.ndarray  # (m, m)

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.const + np.tensordot(x[self.var_idx], self.coeffs, axes=1)

    def cut(self, u) -> tuple:
        """``(g, g0)`` with ``u^T F(x) u = g @ x[var_idx] + g0``."""
        g = (self.coeffs @ u) @ u
        return g, float(u @ self.const @ u)


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """Feasibility problem produced by :func:`encode`.

    Variables are stored node by node in graph order.  ``provenance`` maps
    each edge (and, for full-quadratic, each ``("node", s)`` positivity
    block) to its list of ``("row", i)`` / ``("lmi", i)`` entries.
    """

    template: Template
    graph: LabeledGraph
    gamma: float
    num_vars: int
    lower: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    lmi_blocks: tuple
    provenance: Mapping
    margin: float

    @property
    def linear_rows(self) -> list:
        rows = [(a, "<=", b) for a, b in zip(self.A_ub, self.b_ub)]
        rows += [(a, "==", b) for a, b in zip(self.A_eq, self.b_eq)]
        return rows

    def node_slice(self, node) -> slice:
        k = self.template.params_per_node
        i = self.graph.node_index[node]
        return slice(i * k, (i + 1) * k)

    def unpack(self, x) -> dict:
        x = np.asarray(x, dtype=float)
        n = self.template.dimension
        out = {}
        for s in self.graph.nodes:
            chunk = x[self.node_slice(s)]
            if self.template.kind.is_vector:
                out[s] = chunk.copy()
            else:
                q = np.zeros((n, n))
                q[np.triu_indices(n)] = chunk
                out[s] = q + np.triu(q, 1).T
        return out

    def pack(self, params: Mapping) -> np.ndarray:
        n = self.template.dimension
        x = np.zeros(self.num_vars)
        for s in self.graph.nodes:
            p = np.asarray(params[s], dtype=float)
            x[self.node_slice(s)] = p if self.template.kind.is_vector else p[np.triu_indices(n)]
        return x

    def to_certificate(self, x, graph_id: Optional[str] = None) -> Certificate:
        return Certificate(self.template, self.unpack(x), self.gamma, graph_id)

    def satisfied(self, x, tol: float = VALIDATION_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lower - tol):
            return False
        if self.A_ub.shape[0] and np.any(self.A_ub @ x > self.b_ub + tol):
            return False
        if self.A_eq.shape[0] and np.any(np.abs(self.A_eq @ x - self.b_eq) > tol * max(1, self.num_vars)):
            return False
        return all(symmetric_eigen(b.value(x))[0][0] >= -tol for b in self.lmi_blocks)


def _check_template(system: SwitchedSystem, template: Template):
    if template.dimension != system.dimension:
        raise InvalidInputError(f"template dimension {template.dimension} != system dimension {system.dimension}")


def _check_graph(system: SwitchedSystem, graph: LabeledGraph):
    if tuple(graph.alphabet) != tuple(system.alphabet):
        raise InvalidInputError("graph and system alphabets differ")
    if not graph.edges:
        raise InvalidInputError("graph has no edges; every condition would hold vacuously")


def encode(system: SwitchedSystem, graph: LabeledGraph, template: Template, gamma: float,
           margin: Optional[float] = None, epsilon: float = EPSILON) -> ConstraintSystem:
    """Edge inequalities of ``template`` on ``graph`` at decay rate ``gamma``.

    ``margin`` defaults to 0 for the linear-programming kinds and to
    ``LMI_MARGIN`` for the quadratic ones.  All parameters are bounded
    below by ``epsilon`` (diagonal entries for full-quadratic), and a single
    normalization row fixes the sum of all vector entries (resp. traces) to
    ``n * |nodes|``.
    """
    template = template if isinstance(template, Template) else Template(template, system.dimension)
    _check_template(system, template)
    _check_graph(system, graph)
    if not gamma > 0:
        raise InvalidInputError("gamma must be positive")
    kind = template.kind
    if kind.is_lp and not system.is_nonnegative():
        raise TemplateMismatchError(f"{kind.value} needs entrywise nonnegative matrices")
    if margin is None:
        margin = LP_MARGIN if kind.is_lp else LMI_MARGIN

    n = template.dimension
    per = template.params_per_node
    nodes = graph.nodes
    idx = graph.node_index
    num_vars = per * len(nodes)
    provenance: dict = {}

    def base(s):
        return idx[s] * per

    rows, rhs, blocks = [], [], []
    if kind.is_lp:
        for e in graph.edges:
            C, D, h = e
            A = system[h]
            # copositive: A^T v_D - gamma v_C <= -margin, weighted-linf: A v_C - gamma v_D <= -margin
            src, dst, M = (D, C, A.T) if kind is TemplateKind.COPOSITIVE_LINEAR else (C, D, A)
            entries = []
            for r in range(n):
                row = np.zeros(num_vars)
                row[base(src):base(src) + n] += M[r]
                row[base(dst) + r] -= gamma
                entries.append(("row", len(rows)))
                rows.append(row)
                rhs.append(-margin)
            provenance[e] = entries
        lower = np.full(num_vars, epsilon)
        norm = np.ones(num_vars)
    elif kind is TemplateKind.DIAGONAL_QUADRATIC:
        for e in graph.edges:
            C, D, h = e
            A = system[h]
            var_idx = np.concatenate([base(C) + np.arange(n), base(D) + np.arange(n)])
            coeffs = np.empty((2 * n, n, n))
            for i in range(n):
                coeffs[i] = 0.0
                coeffs[i, i, i] = gamma * gamma
                coeffs[n + i] = -np.outer(A[i], A[i])
            if C == D:
                var_idx, coeffs = _merge(var_idx, coeffs)
            provenance[e] = [("lmi", len(blocks))]
            blocks.append(LMIBlock(e, var_idx, coeffs, -margin * np.eye(n)))
        lower = np.full(num_vars, epsilon)
        norm = np.ones(num_vars)
    else:
        iu = np.triu_indices(n)
        basis = np.empty((per, n, n))
        for k, (i, j) in enumerate(zip(*iu)):
            basis[k] = 0.0
            basis[k, i, j] = basis[k, j, i] = 1.0
        for e in graph.edges:
            C, D, h = e
            A = system[h]
            var_idx = np.concatenate([base(C) + np.arange(per), base(D) + np.arange(per)])
            coeffs = np.concatenate([gamma * gamma * basis, -np.einsum("ai,kab,bj->kij", A, basis, A)])
            if C == D:
                var_idx, coeffs = _merge(var_idx, coeffs)
            provenance[e] = [("lmi", len(blocks))]
            blocks.append(LMIBlock(e, var_idx, coeffs, -margin * np.eye(n)))
        for s in nodes:
            provenance[("node", s)] = [("lmi", len(blocks))]
            blocks.append(LMIBlock(("node", s), base(s) + np.arange(per), basis.copy(), -epsilon * np.eye(n)))
        lower = np.full(num_vars, -np.inf)
        diag = np.array([i == j for i, j in zip(*iu)])
        norm = np.zeros(num_vars)
        for s in nodes:
            lower[base(s):base(s) + per][diag] = epsilon
            norm[base(s):base(s) + per][diag] = 1.0

    A_ub = np.array(rows).reshape(-1, num_vars)
    return ConstraintSystem(
        template, graph, float(gamma), num_vars, lower,
        A_ub, np.array(rhs, dtype=float),
        norm[None, :], np.array([float(n * len(nodes))]),
        tuple(blocks), provenance, float(margin),
    )


def _merge(var_idx, coeffs):
    uniq, inv = np.unique(var_idx, return_inverse=True)
    out = np.zeros((uniq.size,) + coeffs.shape[1:])
    np.add.at(out, inv, coeffs)
    return uniq, out


# --- validation ------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    mode: str
    gamma: float
    worst_slack: float
    violations: list = field(default_factory=list)
    checked: int = 0


def _check_nodes(graph: LabeledGraph, cert: Certificate):
    if set(cert.params) != set(graph.nodes):
        missing = set(graph.nodes) - set(cert.params)
        extra = set(cert.params) - set(graph.nodes)
        raise InvalidCertificateError(
            f"certificate nodes do not match graph (missing {len(missing)}, extra {len(extra)})")


def edge_slack(system: SwitchedSystem, cert: Certificate, edge) -> float:
    """Signed slack of one edge condition; negative means violated.

    Vector kinds return the smallest entry of ``gamma v - |A|^{(T)} v``
    divided by the parameter scale, quadratic kinds the smallest eigenvalue
    of ``gamma^2 Q_C - A^T Q_D A`` divided by ``gamma^2 |Q_C|``.
    """
    C, D, h = edge
    A = system[h]
    g = cert.gamma
    kind = cert.template.kind
    pC, pD = cert.params[C], cert.params[D]
    if kind is TemplateKind.COPOSITIVE_LINEAR:
        return float(np.min(g * pC - np.abs(A).T @ pD) / max(np.abs(pC).max(), np.abs(pD).max()))
    if kind is TemplateKind.WEIGHTED_LINF:
        return float(np.min(g * pD - np.abs(A) @ pC) / max(np.abs(pC).max(), np.abs(pD).max()))
    QC, QD = cert.template.gram(pC), cert.template.gram(pD)
    F = g * g * QC - A.T @ QD @ A
    scale = max(g * g * np.abs(QC).max(), np.abs(A.T @ QD @ A).max(), 1e-300)
    return float(symmetric_eigen(F)[0][0] / scale)


def validate_certificate(system: SwitchedSystem, graph: LabeledGraph, cert: Certificate,
                         mode: str = "exact", samples: int = 1000, seed: int = 0,
                         tol: float = VALIDATION_TOL) -> ValidationReport:
    """Re-check every edge condition of ``cert`` on ``graph``.

    ``exact`` evaluates the algebraic conditions with zero margin, using
    ``|A|`` for the vector kinds so the check is exact for any sign pattern.
    ``sampled`` checks ``W(A x, D) <= gamma W(x, C)`` on ``samples`` random
    unit vectors per edge.
    """
    _check_nodes(graph, cert)
    _check_template(system, cert.template)
    if mode == "exact":
        worst, bad = np.inf, []
        for e in graph.edges:
            s = edge_slack(system, cert, e)
            worst = min(worst, s)
            if s < -tol:
                bad.append((e, s))
        return ValidationReport(not bad, mode, cert.gamma, float(worst), bad, len(graph.edges))
    if mode != "sampled":
        raise InvalidInputError(f"unknown validation mode {mode!r}")
    rng = np.random.default_rng(seed)
    n = system.dimension
    worst, bad = np.inf, []
    for e in graph.edges:
        C, D, h = e
        x = rng.standard_normal((samples, n))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        y = x @ system[h].T
        lhs = _batch_eval(cert, D, y)
        rhs = cert.gamma * _batch_eval(cert, C, x)
        ratio = (rhs - lhs) / rhs
        s = float(ratio.min())
        worst = min(worst, s)
        if s < -tol:
            bad.append((e, s))
    return ValidationReport(not bad, mode, cert.gamma, float(worst), bad, samples * len(graph.edges))


def _batch_eval(cert: Certificate, node, xs) -> np.ndarray:
    p = cert.params[node]
    kind = cert.template.kind
    if kind is TemplateKind.COPOSITIVE_LINEAR:
        return np.abs(xs) @ p
    if kind is TemplateKind.WEIGHTED_LINF:
        return np.max(np.abs(xs) / p, axis=1)
    Q = cert.template.gram(p)
    return np.sqrt(np.maximum(np.einsum("ki,ij,kj->k", xs, Q, xs), 0.0))


# --- duality ---------------------------------------------------------------

def dual_param(kind: TemplateKind, param) -> np.ndarray:
    p = np.asarray(param, dtype=float)
    if kind.is_lp:
        return p.copy()
    if kind is TemplateKind.DIAGONAL_QUADRATIC:
        return 1.0 / p
    return np.linalg.inv(p)


def dualize(system: SwitchedSystem, graph: LabeledGraph, cert: Certificate) -> tuple:
    """``(dual system, transposed graph, dual certificate)`` at the same gamma.

    Copositive-linear and weighted-linf swap with the same vectors; quadratic
    parameters are inverted (diagonal ones entrywise).
    """
    _check_nodes(graph, cert)
    kind = cert.template.kind
    params = {s: dual_param(kind, p) for s, p in cert.params.items()}
    template = Template(kind.dual, cert.template.dimension)
    graph_id = None if cert.graph_id is None else f"transpose({cert.graph_id})"
    if cert.graph_id and cert.graph_id.startswith("transpose(") and cert.graph_id.endswith(")"):
        graph_id = cert.graph_id[len("transpose("):-1]
    return system.dual(), transpose(graph), Certificate(template, params, cert.gamma, graph_id)
