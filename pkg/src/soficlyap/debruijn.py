"""Generalized De Bruijn presentations and their covering semantics.

For a shift of finite type ``Z`` of order ``M`` and ``K >= M``, the graph
of order ``K`` and position ``k`` has the admissible ``K``-words as nodes.
An edge ``i -> j`` slides the window by one symbol and carries the window
symbol that sits at time 0::

    label = j[K-1]     if k == 0
    label = i[K-k]     if 1 <= k <= K

Node ``i`` stands for the cylinder ``[i]`` on the index window
``[-K+k, k-1]``, so ``k = 0`` looks only at the past and ``k = K`` only at
the future.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from .errors import InvalidInputError, InvalidPositionError, OrderTooSmallError
from .shift import (
    Cylinder, LabeledGraph, SoficShift, Word, is_admissible, language,
)


@dataclass(frozen=True)
class CoveringClass:
    node: Word
    cylinder: Cylinder


@dataclass(frozen=True)
class CylinderCovering:
    """A finite covering of ``base`` whose classes are cylinders, together
    with the graph that is claimed to present it (one node per class)."""

    base: SoficShift
    graph: LabeledGraph
    classes: Mapping

    def __post_init__(self):
        if set(self.classes) != set(self.graph.nodes):
            raise InvalidInputError("covering classes must be keyed by the graph nodes")
        object.__setattr__(self, "classes", {s: self.classes[s] for s in self.graph.nodes})

    def __hash__(self):
        return hash((self.base, self.graph, tuple(self.classes.items())))


@dataclass(frozen=True)
class DeBruijnGraph:
    base: SoficShift
    order: int
    position: int
    graph: LabeledGraph = field(compare=False)

    @property
    def nodes(self) -> tuple:
        return self.graph.nodes

    @property
    def edges(self) -> tuple:
        return self.graph.edges

    @property
    def graph_id(self) -> str:
        return f"debruijn:{self.order},{self.position}"

    def covering(self) -> CylinderCovering:
        return CylinderCovering(self.base, self.graph,
                                {c.node: c.cylinder for c in covering_classes(self)})

    def as_shift(self) -> SoficShift:
        return SoficShift(self.graph, finite_type_order=self.base.finite_type_order,
                          forbidden_words=self.base.forbidden_words)


def edge_label(i: Word, j: Word, K: int, k: int):
    if K == 0:
        raise InvalidInputError("order-0 edges are labeled directly by their symbol")
    return j[K - 1] if k == 0 else i[K - k]


def de_bruijn(shift: SoficShift, K: int, k: int) -> DeBruijnGraph:
    """Build ``G_{K,k}(Z)``.

    Besides the overlap and label rules, an edge ``i -> j`` requires the
    (K+1)-word ``i + j[-1]`` to be admissible.  At ``K == M`` the overlap
    rule alone would admit edges such as ``[a] -> [a]`` in the golden mean
    shift.
    """
    M = shift.finite_type_order
    if M is None:
        raise InvalidInputError("De Bruijn graphs need a shift of known finite type order")
    if K < 0 or K < M:
        raise OrderTooSmallError(f"order K={K} is below the finite type order M={M}")
    if not 0 <= k <= K:
        raise InvalidPositionError(f"position k={k} outside [0, {K}]")
    alphabet = shift.alphabet
    if K == 0:
        symbols = [w[0] for w in language(shift, 1)]
        g = LabeledGraph(alphabet, ((),), tuple(((), (), h) for h in symbols))
        return DeBruijnGraph(shift, 0, 0, g)

    nodes = language(shift, K)
    long_words = set(language(shift, K + 1))
    by_prefix: dict = {}
    for j in nodes:
        by_prefix.setdefault(j[:-1], []).append(j)
    edges = []
    for i in nodes:
        for j in by_prefix.get(i[1:], ()):
            if i + j[-1:] in long_words:
                edges.append((i, j, edge_label(i, j, K, k)))
    return DeBruijnGraph(shift, K, k, LabeledGraph(alphabet, tuple(nodes), tuple(edges)))


def covering_classes(db: DeBruijnGraph) -> list:
    K, k = db.order, db.position
    return [CoveringClass(w, Cylinder(w, -K + k)) for w in db.nodes]


def successor_map(db: Union[DeBruijnGraph, LabeledGraph], node, symbol) -> tuple:
    """Targets of the edges leaving ``node`` with label ``symbol``."""
    g = db.graph if isinstance(db, DeBruijnGraph) else db
    if node not in g.node_index:
        raise InvalidInputError(f"unknown node {node!r}")
    return g.successors(node, symbol)


# --- finite-horizon class semantics ---------------------------------------

def _window_words(base: SoficShift, lo: int, hi: int) -> tuple:
    return language(base, hi - lo + 1)


def _matches(word: Word, lo: int, cyl: Cylinder) -> bool:
    off = cyl.start - lo
    return word[off:off + len(cyl.word)] == cyl.word


def future_words(base: SoficShift, cyl: Cylinder, h: int) -> frozenset:
    """Length-``h`` prefixes ``z[0:h]`` of sequences of ``base`` lying in ``cyl``."""
    if h == 0:
        return frozenset({()}) if _cylinder_nonempty(base, cyl) else frozenset()
    lo = min(cyl.start, 0) if cyl.word else 0
    hi = max(cyl.end, h - 1) if cyl.word else h - 1
    out = set()
    for w in _window_words(base, lo, hi):
        if not cyl.word or _matches(w, lo, cyl):
            out.add(w[-lo:-lo + h])
    return frozenset(out)


def past_words(base: SoficShift, cyl: Cylinder, h: int) -> frozenset:
    """Length-``h`` suffixes ``z[-h:0]`` of sequences of ``base`` lying in ``cyl``."""
    if h == 0:
        return frozenset({()}) if _cylinder_nonempty(base, cyl) else frozenset()
    lo = min(cyl.start, -h) if cyl.word else -h
    hi = max(cyl.end, -1) if cyl.word else -1
    out = set()
    for w in _window_words(base, lo, hi):
        if not cyl.word or _matches(w, lo, cyl):
            start = -h - lo
            out.add(w[start:start + h])
    return frozenset(out)


def _cylinder_nonempty(base: SoficShift, cyl: Cylinder) -> bool:
    return is_admissible(base, cyl.word)


def cylinders_intersect(base: SoficShift, c1: Cylinder, c2: Cylinder) -> bool:
    if not c1.word or not c2.word:
        other = c2 if not c1.word else c1
        return _cylinder_nonempty(base, other)
    lo, hi = min(c1.start, c2.start), max(c1.end, c2.end)
    return any(_matches(w, lo, c1) and _matches(w, lo, c2) for w in _window_words(base, lo, hi))


@dataclass
class CoveringReport:
    ok: bool
    horizon: int
    violations: list = field(default_factory=list)


def _as_covering(obj) -> CylinderCovering:
    return obj.covering() if isinstance(obj, DeBruijnGraph) else obj


def verify_covering(cover: Union[DeBruijnGraph, CylinderCovering], horizon: int) -> CoveringReport:
    """Check the propagation laws of a graph-induced covering up to ``horizon``.

    For every class ``C``, symbol ``i`` and ``1 <= h <= horizon``:

    * futures of ``C`` starting with ``i`` equal ``i`` followed by the
      futures of the ``i``-successors of ``C`` (one symbol shorter);
    * pasts of ``D`` ending with ``i`` equal the pasts of the
      ``i``-predecessors of ``D`` followed by ``i``;
    * the classes jointly produce every admissible word.
    """
    if horizon < 1:
        raise InvalidInputError("horizon must be >= 1")
    cov = _as_covering(cover)
    base, g = cov.base, cov.graph
    violations = []
    for h in range(1, horizon + 1):
        fut = {s: future_words(base, c, h) for s, c in cov.classes.items()}
        fut_short = {s: future_words(base, c, h - 1) for s, c in cov.classes.items()}
        past = {s: past_words(base, c, h) for s, c in cov.classes.items()}
        past_short = {s: past_words(base, c, h - 1) for s, c in cov.classes.items()}
        for s in g.nodes:
            for i in g.alphabet:
                lhs = {w for w in fut[s] if w[0] == i}
                rhs = {(i,) + w for d in g.successors(s, i) for w in fut_short[d]}
                if lhs != rhs:
                    violations.append(("future", h, s, i))
                lhs = {w for w in past[s] if w[-1] == i}
                rhs = {w + (i,) for c in g.predecessors(s, i) for w in past_short[c]}
                if lhs != rhs:
                    violations.append(("past", h, s, i))
        union = set().union(*fut.values()) if fut else set()
        if union != set(language(base, h)):
            violations.append(("union", h, None, None))
    return CoveringReport(not violations, horizon, violations)


def check_nonredundant(cover: Union[DeBruijnGraph, CylinderCovering]) -> bool:
    cov = _as_covering(cover)
    items = list(cov.classes.values())
    for a, b in itertools.combinations(items, 2):
        if a.start == b.start and len(a.word) == len(b.word) and a.word:
            if a.word == b.word:
                return False
            continue
        if cylinders_intersect(cov.base, a, b):
            return False
    return True


def to_dot(graph: LabeledGraph, name: str = "G") -> str:
    lines = [f'digraph "{name}" {{']
    for s in graph.nodes:
        lines.append(f'  "{graph.node_name(s)}";')
    for s, q, i in graph.edges:
        lines.append(f'  "{graph.node_name(s)}" -> "{graph.node_name(q)}" [label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
