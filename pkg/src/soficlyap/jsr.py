"""Ground truth for certificates: products, lower bounds, converse
constructions and trajectory checks."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .debruijn import DeBruijnGraph, de_bruijn
from .errors import DegenerateCertificateError, InadmissibleWordError, InvalidInputError
from .shift import is_admissible
from .system import SwitchedSystem
from .templates import Certificate, Template, TemplateKind, ValidationReport, validate_certificate


def transition_matrix(system: SwitchedSystem, word: Sequence, check: bool = True) -> np.ndarray:
    """``A(w_{k-1}) ... A(w_1) A(w_0)``; the identity for the empty word."""
    word = tuple(word)
    if check and not is_admissible(system.shift, word):
        raise InadmissibleWordError(f"word {system.alphabet.format_word(word)!r} is not admissible")
    out = np.eye(system.dimension)
    for h in word:
        out = system[h] @ out
    return out


def spectral_radius(matrix) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(matrix, dtype=float)))))


def _canonical_rotation(word: tuple) -> tuple:
    return min(word[i:] + word[:i] for i in range(len(word)))


def closed_walks(system: SwitchedSystem, max_len: int) -> tuple:
    """Label words of closed walks in the presentation, one per rotation class,
    together with their products."""
    g = system.shift.presentation
    seen: dict = {}
    for start in g.nodes:
        frontier = [(start, (), np.eye(system.dimension))]
        for _ in range(max_len):
            nxt = []
            for node, word, prod in frontier:
                for _, q, h in g.out_edges(node):
                    w = word + (h,)
                    p = system[h] @ prod
                    if q == start:
                        key = _canonical_rotation(w)
                        if key not in seen:
                            seen[key] = p
                    nxt.append((q, w, p))
            frontier = nxt
    words = tuple(seen)
    return words, [seen[w] for w in words]


def rho_lower(system: SwitchedSystem, max_len: int = 8) -> float:
    """``max rho(S(w))^(1/|w|)`` over closed walks ``w`` of the presentation, ``|w| <= max_len``."""
    if max_len < 1:
        raise InvalidInputError("max_len must be >= 1")
    words, prods = closed_walks(system, max_len)
    if not words:
        return 0.0
    radii = np.max(np.abs(np.linalg.eigvals(np.array(prods))), axis=1)
    lengths = np.array([len(w) for w in words], dtype=float)
    return float(np.max(radii ** (1.0 / lengths)))


def best_cycle(system: SwitchedSystem, max_len: int = 8) -> tuple:
    """The closed walk attaining :func:`rho_lower` and its growth rate.

    Among walks within a relative 1e-12 of the best rate the shortest wins,
    so repetitions of a cycle are never reported.
    """
    words, prods = closed_walks(system, max_len)
    rates = np.array([spectral_radius(p) ** (1.0 / len(w)) for w, p in zip(words, prods)])
    top = rates.max()
    near = [i for i in range(len(words)) if rates[i] >= top * (1 - 1e-12)]
    i = min(near, key=lambda j: len(words[j]))
    return words[i], float(rates[i])


# --- converse certificates -------------------------------------------------

@dataclass
class ConverseResult:
    certificate: Certificate
    graph: DeBruijnGraph
    report: ValidationReport
    truncation: float  # max |S(w)|_2 / gamma^K over the K-word windows w

    @property
    def ok(self) -> bool:
        return self.report.ok


def converse_quadratic(system: SwitchedSystem, K: int, gamma_tilde: float,
                       position: str = "future") -> ConverseResult:
    """Truncated quadratic certificates built from products along window words.

    ``future`` (on ``G_{K,K}``)::

        Q(w) = sum_{k<K} gamma^(-2k) S_k(w)^T S_k(w),   S_k(w) = A(w_{k-1})...A(w_0)

    ``memory`` (on ``G_{K,0}``)::

        P(w) = sum_{k<K} gamma^(-2k) R_k(w) R_k(w)^T,   R_k(w) = A(w_{K-1})...A(w_{K-k})
        Q(w) = P(w)^{-1}

    The result is validated exactly; validity is not guaranteed for small K.
    """
    if not gamma_tilde > 0:
        raise InvalidInputError("gamma_tilde must be positive")
    if K < 1:
        raise DegenerateCertificateError("the truncated sum needs K >= 1 terms")
    if position not in ("future", "memory"):
        raise InvalidInputError(f"position must be 'future' or 'memory', not {position!r}")
    db = de_bruijn(system.shift, K, K if position == "future" else 0)
    n = system.dimension
    params = {}
    for w in db.nodes:
        acc = np.zeros((n, n))
        prod = np.eye(n)
        if position == "future":
            for k in range(K):
                acc += gamma_tilde ** (-2 * k) * prod.T @ prod
                prod = system[w[k]] @ prod
        else:
            for k in range(K):
                acc += gamma_tilde ** (-2 * k) * prod @ prod.T
                prod = prod @ system[w[K - 1 - k]]
            if np.linalg.cond(acc) > 1e12:
                raise DegenerateCertificateError(f"truncated sum is singular at window {w}")
            acc = np.linalg.inv(acc)
        params[w] = 0.5 * (acc + acc.T)
    cert = Certificate(Template(TemplateKind.FULL_QUADRATIC, n), params, gamma_tilde, db.graph_id)
    report = validate_certificate(system, db.graph, cert, mode="exact")
    tail = 0.0
    for w in db.nodes:
        tail = max(tail, np.linalg.norm(transition_matrix(system, w, check=False), 2) / gamma_tilde ** K)
    return ConverseResult(cert, db, report, float(tail))


# --- trajectories ----------------------------------------------------------

@dataclass
class Trajectory:
    x0: np.ndarray
    word: tuple
    states: np.ndarray  # (T+1, n)
    nodes: tuple  # presentation path, length T+1

    @property
    def steps(self) -> int:
        return len(self.word)


def trajectory_from_word(system: SwitchedSystem, x0, word, nodes: Optional[tuple] = None) -> Trajectory:
    x = np.asarray(x0, dtype=float).reshape(system.dimension)
    states = [x]
    for h in word:
        x = system[h] @ x
        states.append(x)
    return Trajectory(np.array(states[0]), tuple(word), np.array(states), tuple(nodes or ()))


def simulate(system: SwitchedSystem, x0, steps: int, seed: int = 0, start=None) -> Trajectory:
    """Follow a uniformly random out-edge at every step of the presentation."""
    if steps < 0:
        raise InvalidInputError("steps must be >= 0")
    g = system.shift.presentation
    rng = np.random.default_rng(seed)
    node = g.nodes[rng.integers(len(g.nodes))] if start is None else start
    if node not in g.node_index:
        raise InvalidInputError(f"unknown start node {start!r}")
    nodes, word = [node], []
    for _ in range(steps):
        out = g.out_edges(node)
        _, node, h = out[rng.integers(len(out))]
        word.append(h)
        nodes.append(node)
    return trajectory_from_word(system, x0, word, tuple(nodes))


def random_trajectories(system: SwitchedSystem, count: int, steps: int, seed: int = 0) -> list:
    """``count`` walks with Gaussian unit initial states, one substream per walk."""
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        x0 = rng.standard_normal(system.dimension)
        x0 /= np.linalg.norm(x0)
        out.append(simulate(system, x0, steps, seed=int(rng.integers(2**63))))
    return out


_GRAPH_ID = re.compile(r"^debruijn:(\d+),(\d+)$")


def _window_spec(cert: Certificate, db: Optional[DeBruijnGraph]) -> tuple:
    if db is not None:
        return db.order, db.position
    m = _GRAPH_ID.match(cert.graph_id or "")
    if not m:
        raise InvalidInputError("certificate is not attached to a De Bruijn graph; pass db explicitly")
    return int(m.group(1)), int(m.group(2))


def window_class(word: tuple, t: int, K: int, k: int) -> Optional[tuple]:
    """Window word ``z[t-K+k : t+k]`` or None if it leaves the recorded word."""
    a, b = t - K + k, t + k
    if a < 0 or b > len(word):
        return None
    return tuple(word[a:b])


@dataclass
class DecreaseReport:
    ok: bool
    checked: int
    skipped: int
    worst_ratio: float
    violations: list = field(default_factory=list)
    edge_mismatches: int = 0


def check_decrease(cert: Certificate, system: SwitchedSystem, trajectories: Sequence,
                   db: Optional[DeBruijnGraph] = None, tol: float = 1e-9) -> DecreaseReport:
    """Stepwise ``W(x_{t+1}, c_{t+1}) <= (gamma + tol) W(x_t, c_t)`` along trajectories,
    where ``c_t`` is the window class of time ``t``."""
    K, k = _window_spec(cert, db)
    if db is None:
        db = de_bruijn(system.shift, K, k)
    edges = set(db.edges)
    checked = skipped = mismatches = 0
    worst = 0.0
    bad = []
    for ti, tr in enumerate(trajectories):
        for t in range(tr.steps):
            c0 = window_class(tr.word, t, K, k)
            c1 = window_class(tr.word, t + 1, K, k)
            if c0 is None or c1 is None:
                skipped += 1
                continue
            if (c0, c1, tr.word[t]) not in edges:
                mismatches += 1
            v0 = cert.value(c0, tr.states[t])
            v1 = cert.value(c1, tr.states[t + 1])
            checked += 1
            ratio = v1 / v0 if v0 > 0 else (0.0 if v1 == 0 else np.inf)
            worst = max(worst, ratio)
            if v1 > (cert.gamma + tol) * v0:
                bad.append((ti, t, float(ratio)))
    return DecreaseReport(not bad and mismatches == 0, checked, skipped, float(worst), bad, mismatches)


@dataclass
class UESReport:
    ok: bool
    constant: float
    gamma: float
    checked: int
    worst_ratio: float  # max |x_t| / (M gamma^(t-t0) |x_t0|)
    violations: list = field(default_factory=list)


def check_ues_bound(system: SwitchedSystem, cert: Certificate, trajectories: Sequence,
                    M: Optional[float] = None, gamma: Optional[float] = None,
                    db: Optional[DeBruijnGraph] = None, tol: float = 1e-9) -> UESReport:
    """``|x_t| <= M gamma^(t - t0) |x_t0|`` with ``M = M2 / M1`` by default.

    ``t0`` is the first time whose window class lies inside the recorded
    word (0 for future graphs).  A certificate without a De Bruijn graph id
    is treated as window-free (``t0 = 0``).
    """
    if M is None:
        m1, m2 = cert.margins
        M = m2 / m1
    gamma = cert.gamma if gamma is None else gamma
    try:
        K, k = _window_spec(cert, db)
        t0 = K - k
    except InvalidInputError:
        t0 = 0
    checked = 0
    worst = 0.0
    bad = []
    for ti, tr in enumerate(trajectories):
        if tr.steps < t0:
            continue
        norms = np.linalg.norm(tr.states, axis=1)
        base = norms[t0]
        for t in range(t0, tr.steps + 1):
            bound = M * gamma ** (t - t0) * base
            checked += 1
            ratio = norms[t] / bound if bound > 0 else (0.0 if norms[t] == 0 else np.inf)
            worst = max(worst, ratio)
            if norms[t] > bound * (1 + tol) + 1e-300:
                bad.append((ti, t, float(ratio)))
    return UESReport(not bad, float(M), float(gamma), checked, float(worst), bad)
