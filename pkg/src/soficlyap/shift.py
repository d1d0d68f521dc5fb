"""Alphabets, words, labeled graphs and sofic shifts.

Words are plain tuples of symbols.  A sofic shift is stored through one of
its presentations, always trimmed so that every node has at least one
incoming and one outgoing edge; finite-horizon languages are then simply
path labels.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .errors import EmptyShiftError, InvalidInputError

Symbol = str
Word = tuple  # tuple[Symbol, ...]
Node = Hashable
Edge = tuple  # (source, target, symbol)


@dataclass(frozen=True)
class Alphabet:
    """A finite, totally ordered set of symbols.

    The order is used for every enumeration and tie-break in the package.
    A plain string is split into one symbol per character.
    """

    symbols: tuple

    def __post_init__(self):
        syms = tuple(self.symbols)
        if not syms:
            raise InvalidInputError("alphabet must contain at least one symbol")
        for s in syms:
            if not isinstance(s, str) or not s:
                raise InvalidInputError(f"symbols must be nonempty strings, got {s!r}")
        if len(set(syms)) != len(syms):
            raise InvalidInputError(f"duplicate symbols in alphabet {syms}")
        object.__setattr__(self, "symbols", syms)

    @cached_property
    def _index(self) -> dict:
        return {s: i for i, s in enumerate(self.symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self._index

    def index(self, symbol: Symbol) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise InvalidInputError(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    def sort_key(self, word: Sequence[Symbol]) -> tuple:
        return tuple(self._index[s] for s in word)

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def parse_word(self, text) -> Word:
        """Turn a string (or a sequence of symbols) into a validated word.

        Strings are split per character when every symbol is one character
        long, otherwise on ``.`` separators.
        """
        if isinstance(text, str):
            if self.single_char:
                word = tuple(text)
            else:
                word = tuple(t for t in text.split(".") if t)
        else:
            word = tuple(text)
        for s in word:
            if s not in self:
                raise InvalidInputError(f"symbol {s!r} of word {text!r} not in alphabet")
        return word

    def format_word(self, word: Sequence[Symbol]) -> str:
        if not word:
            return "ε"
        return ("" if self.single_char else ".").join(word)


@dataclass(frozen=True)
class Cylinder:
    """The set of sequences that read ``word`` on the index window [start, end]."""

    word: Word
    start: int

    @property
    def end(self) -> int:
        return self.start + len(self.word) - 1

    @classmethod
    def span(cls, word: Sequence[Symbol], a: int, b: int) -> "Cylinder":
        if b - a + 1 != len(word):
            raise InvalidInputError(f"window [{a},{b}] does not fit word of length {len(word)}")
        return cls(tuple(word), a)


@dataclass(frozen=True)
class LabeledGraph:
    """Finite node set with labeled edges ``(source, target, symbol)``.

    Edges are stored as a sorted, duplicate-free tuple (node order first,
    then alphabet order), so two graphs with the same edge set compare equal.
    """

    alphabet: Alphabet
    nodes: tuple
    edges: tuple = ()

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if len(set(nodes)) != len(nodes):
            raise InvalidInputError("duplicate node identifiers")
        index = {s: i for i, s in enumerate(nodes)}
        clean = set()
        for e in self.edges:
            try:
                s, q, sym = e
            except (TypeError, ValueError):
                raise InvalidInputError(f"malformed edge {e!r}") from None
            if s not in index or q not in index:
                raise InvalidInputError(f"edge {e!r} uses an undeclared node")
            if sym not in self.alphabet:
                raise InvalidInputError(f"edge {e!r} uses a symbol outside the alphabet")
            clean.add((s, q, sym))
        edges = tuple(sorted(clean, key=lambda e: (index[e[0]], index[e[1]], self.alphabet.index(e[2]))))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)

    @cached_property
    def node_index(self) -> dict:
        return {s: i for i, s in enumerate(self.nodes)}

    @cached_property
    def _out(self) -> dict:
        out = {s: [] for s in self.nodes}
        for e in self.edges:
            out[e[0]].append(e)
        return {s: tuple(v) for s, v in out.items()}

    @cached_property
    def _in(self) -> dict:
        inc = {s: [] for s in self.nodes}
        for e in self.edges:
            inc[e[1]].append(e)
        return {s: tuple(v) for s, v in inc.items()}

    def out_edges(self, node) -> tuple:
        return self._out[node]

    def in_edges(self, node) -> tuple:
        return self._in[node]

    def successors(self, node, symbol) -> tuple:
        return tuple(q for _, q, i in self._out[node] if i == symbol)

    def predecessors(self, node, symbol) -> tuple:
        return tuple(s for s, _, i in self._in[node] if i == symbol)

    def subgraph(self, keep: Iterable) -> "LabeledGraph":
        keep = set(keep)
        nodes = tuple(s for s in self.nodes if s in keep)
        edges = tuple(e for e in self.edges if e[0] in keep and e[1] in keep)
        return LabeledGraph(self.alphabet, nodes, edges)

    def trimmed(self) -> "LabeledGraph":
        """Maximal subgraph in which every node has an in-edge and an out-edge."""
        alive = set(self.nodes)
        changed = True
        while changed:
            changed = False
            has_out = {e[0] for e in self.edges if e[0] in alive and e[1] in alive}
            has_in = {e[1] for e in self.edges if e[0] in alive and e[1] in alive}
            keep = alive & has_out & has_in
            if keep != alive:
                alive = keep
                changed = True
        return self if len(alive) == len(self.nodes) else self.subgraph(alive)

    def relabeled(self, mapping: Mapping) -> "LabeledGraph":
        nodes = tuple(mapping[s] for s in self.nodes)
        edges = tuple((mapping[s], mapping[q], i) for s, q, i in self.edges)
        return LabeledGraph(self.alphabet, nodes, edges)

    def node_name(self, node) -> str:
        if isinstance(node, tuple):
            return self.alphabet.format_word(node)
        return str(node)


def transpose(graph: LabeledGraph) -> LabeledGraph:
    """Reverse every edge; nodes and their order are kept."""
    return LabeledGraph(graph.alphabet, graph.nodes, tuple((q, s, i) for s, q, i in graph.edges))


@dataclass(frozen=True)
class GraphPredicates:
    deterministic: bool
    complete: bool
    co_deterministic: bool
    co_complete: bool
    strongly_connected: bool


def _forward_flags(graph: LabeledGraph) -> tuple:
    det = comp = True
    for s in graph.nodes:
        counts = defaultdict(int)
        for _, _, i in graph.out_edges(s):
            counts[i] += 1
        if any(c > 1 for c in counts.values()):
            det = False
        if any(counts[i] == 0 for i in graph.alphabet):
            comp = False
    return det, comp


def _reachable(graph: LabeledGraph, start, forward: bool = True) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        edges = graph.out_edges(s) if forward else graph.in_edges(s)
        for e in edges:
            nxt = e[1] if forward else e[0]
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def graph_predicates(graph: LabeledGraph) -> GraphPredicates:
    det, comp = _forward_flags(graph)
    co_det, co_comp = _forward_flags(transpose(graph))
    if graph.nodes:
        root = graph.nodes[0]
        n = len(graph.nodes)
        # A lone node counts as strongly connected (empty path).
        strong = len(_reachable(graph, root)) == n and len(_reachable(graph, root, forward=False)) == n
    else:
        strong = True
    return GraphPredicates(det, comp, co_det, co_comp, strong)


def _refine_colors(g1: LabeledGraph, g2: LabeledGraph) -> tuple:
    """Joint color refinement; colors are comparable across both graphs."""

    def initial(g):
        out = {}
        for s in g.nodes:
            outs = tuple(sorted(g.alphabet.index(i) for _, _, i in g.out_edges(s)))
            ins = tuple(sorted(g.alphabet.index(i) for _, _, i in g.in_edges(s)))
            loops = tuple(sorted(g.alphabet.index(i) for _, q, i in g.out_edges(s) if q == s))
            out[s] = (outs, ins, loops)
        return out

    c1, c2 = initial(g1), initial(g2)
    while True:
        table = {}

        def canon(sig):
            return table.setdefault(sig, len(table))

        sigs1 = {s: (c1[s], tuple(sorted((g1.alphabet.index(i), c1[q]) for _, q, i in g1.out_edges(s))),
                     tuple(sorted((g1.alphabet.index(i), c1[p]) for p, _, i in g1.in_edges(s))))
                 for s in g1.nodes}
        sigs2 = {s: (c2[s], tuple(sorted((g2.alphabet.index(i), c2[q]) for _, q, i in g2.out_edges(s))),
                     tuple(sorted((g2.alphabet.index(i), c2[p]) for p, _, i in g2.in_edges(s))))
                 for s in g2.nodes}
        for sig in sorted(set(sigs1.values()) | set(sigs2.values()), key=repr):
            canon(sig)
        n1 = {s: table[sig] for s, sig in sigs1.items()}
        n2 = {s: table[sig] for s, sig in sigs2.items()}
        before = len({repr(c) for c in c1.values()} | {repr(c) for c in c2.values()})
        if len(table) == before:
            return n1, n2
        c1, c2 = n1, n2


def are_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> Optional[dict]:
    """Label-preserving node bijection ``g1 -> g2``, or ``None``.

    Candidates are restricted by joint color refinement, then assigned by
    backtracking with incremental edge-consistency checks.
    """
    if set(g1.alphabet) != set(g2.alphabet):
        return None
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return None
    if sorted(i for *_, i in g1.edges) != sorted(i for *_, i in g2.edges):
        return None
    col1, col2 = _refine_colors(g1, g2)
    if sorted(col1.values()) != sorted(col2.values()):
        return None

    lab1 = defaultdict(frozenset)
    for s, q, i in g1.edges:
        lab1[(s, q)] = lab1[(s, q)] | {i}
    lab2 = defaultdict(frozenset)
    for s, q, i in g2.edges:
        lab2[(s, q)] = lab2[(s, q)] | {i}

    classes2 = defaultdict(list)
    for s in g2.nodes:
        classes2[col2[s]].append(s)
    order = sorted(g1.nodes, key=lambda s: (len(classes2[col1[s]]), g1.node_index[s]))

    mapping: dict = {}
    used: set = set()

    def consistent(u, v) -> bool:
        if lab1.get((u, u), frozenset()) != lab2.get((v, v), frozenset()):
            return False
        for u2, v2 in mapping.items():
            if lab1.get((u, u2), frozenset()) != lab2.get((v, v2), frozenset()):
                return False
            if lab1.get((u2, u), frozenset()) != lab2.get((v2, v), frozenset()):
                return False
        return True

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        u = order[pos]
        for v in classes2[col1[u]]:
            if v in used or not consistent(u, v):
                continue
            mapping[u] = v
            used.add(v)
            if extend(pos + 1):
                return True
            del mapping[u]
            used.discard(v)
        return False

    if extend(0):
        return {s: mapping[s] for s in g1.nodes}
    return None


@dataclass(frozen=True)
class SoficShift:
    """A sofic shift held through a trimmed presentation.

    ``finite_type_order`` and ``forbidden_words`` are filled in when the
    shift is known to be of finite type.
    """

    presentation: LabeledGraph
    finite_type_order: Optional[int] = None
    forbidden_words: Optional[tuple] = None
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        trimmed = self.presentation.trimmed()
        if not trimmed.nodes:
            raise EmptyShiftError("presentation has no bi-infinite walk")
        object.__setattr__(self, "presentation", trimmed)
        if self.forbidden_words is not None:
            object.__setattr__(self, "forbidden_words", tuple(tuple(w) for w in self.forbidden_words))

    @property
    def alphabet(self) -> Alphabet:
        return self.presentation.alphabet

    def accepts(self, word: Sequence[Symbol]) -> bool:
        return is_admissible(self, word)


def is_admissible(shift: SoficShift, word: Sequence[Symbol]) -> bool:
    """Whether ``word`` is a factor of some sequence of the shift."""
    g = shift.presentation
    current = set(g.nodes)
    for sym in word:
        if sym not in g.alphabet:
            return False
        current = {q for s in current for q in g.successors(s, sym)}
        if not current:
            return False
    return True


@lru_cache(maxsize=512)
def _language(shift: SoficShift, n: int) -> tuple:
    g = shift.presentation
    frontier = {(): frozenset(g.nodes)}
    order = [()]
    for _ in range(n):
        nxt = {}
        new_order = []
        for w in order:
            ends = frontier[w]
            for sym in g.alphabet:
                reach = frozenset(q for s in ends for q in g.successors(s, sym))
                if reach:
                    w2 = w + (sym,)
                    nxt[w2] = reach
                    new_order.append(w2)
        frontier, order = nxt, new_order
    return tuple(order)


def language(shift: SoficShift, n: int) -> tuple:
    """All admissible words of length ``n``, in lexicographic alphabet order."""
    if n < 0:
        raise InvalidInputError("horizon must be nonnegative")
    return _language(shift, n)


def shifts_equal(s1: SoficShift, s2: SoficShift, horizon: int) -> bool:
    if horizon < 1:
        raise InvalidInputError("horizon must be >= 1")
    return all(set(language(s1, n)) == set(language(s2, n)) for n in range(1, horizon + 1))


def default_equality_horizon(s1: SoficShift, s2: SoficShift) -> int:
    """Horizon used by the CLI: product of presentation sizes plus one."""
    return len(s1.presentation.nodes) * len(s2.presentation.nodes) + 1


def make_full_shift(alphabet: Alphabet) -> SoficShift:
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(alphabet)
    g = LabeledGraph(alphabet, ((),), tuple(((), (), s) for s in alphabet))
    return SoficShift(g, finite_type_order=0, forbidden_words=(), name="full")


def _contains_factor(word: Word, forbidden: frozenset, lengths: tuple) -> bool:
    n = len(word)
    for L in lengths:
        for i in range(n - L + 1):
            if word[i:i + L] in forbidden:
                return True
    return False


def make_finite_type_shift(alphabet: Alphabet, forbidden: Iterable) -> SoficShift:
    """Shift of all sequences avoiding every forbidden factor.

    The presentation is the order-M window graph (M + 1 = longest forbidden
    word): nodes are clean words of length M, edges append one symbol when
    the resulting (M+1)-window is clean.
    """
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(alphabet)
    words = tuple(dict.fromkeys(alphabet.parse_word(w) for w in forbidden))
    if any(len(w) == 0 for w in words):
        raise EmptyShiftError("the empty word cannot be forbidden")
    M = max((len(w) for w in words), default=1) - 1
    fset = frozenset(words)
    lengths = tuple(sorted({len(w) for w in words}))

    nodes = [()]
    for _ in range(M):
        nodes = [w + (s,) for w in nodes for s in alphabet
                 if not _contains_factor(w + (s,), fset, lengths)]
    node_set = set(nodes)
    edges = []
    for u in nodes:
        for s in alphabet:
            window = u + (s,)
            if _contains_factor(window, fset, lengths):
                continue
            v = window[1:]
            if v in node_set:
                edges.append((u, v, s))
    g = LabeledGraph(alphabet, tuple(nodes), tuple(edges))
    return SoficShift(g, finite_type_order=M, forbidden_words=words)


def reverse_shift(shift: SoficShift) -> SoficShift:
    """Time-inverted shift, presented by the transpose graph."""
    forb = None if shift.forbidden_words is None else tuple(w[::-1] for w in shift.forbidden_words)
    name = None if shift.name is None else f"{shift.name}^-1"
    return SoficShift(transpose(shift.presentation), shift.finite_type_order, forb, name)


def shift_from_graph(graph: LabeledGraph, finite_type_order: Optional[int] = None,
                     name: Optional[str] = None) -> SoficShift:
    return SoficShift(graph, finite_type_order=finite_type_order, name=name)


# --- built-ins -------------------------------------------------------------

AB = Alphabet(("a", "b"))
INTEGER_LINE_ALPHABET = Alphabet(("∘", "•"))


def golden_mean_shift() -> SoficShift:
    """No two consecutive ``a``'s."""
    s = make_finite_type_shift(AB, ["aa"])
    return SoficShift(s.presentation, s.finite_type_order, s.forbidden_words, name="golden-mean")


def integer_line_shift() -> SoficShift:
    """Sequences with at most one ``∘``: the time-varying systems embedding."""
    g = LabeledGraph(INTEGER_LINE_ALPHABET, ("p", "f"),
                     (("p", "p", "•"), ("p", "f", "∘"), ("f", "f", "•")))
    return SoficShift(g, name="integer-line")


BUILTIN_SHIFTS = {
    "full": lambda: make_full_shift(AB),
    "golden-mean": golden_mean_shift,
    "integer-line": integer_line_shift,
}


def builtin_shift(name: str) -> SoficShift:
    try:
        return BUILTIN_SHIFTS[name]()
    except KeyError:
        raise InvalidInputError(f"unknown built-in shift {name!r}; known: {sorted(BUILTIN_SHIFTS)}") from None


def shift_from_spec(spec) -> SoficShift:
    """Build a shift from its JSON description (or a built-in name).

    Accepted forms::

        "golden-mean"
        {"builtin": "full", "alphabet": ["a", "b", "c"]}
        {"alphabet": [...], "mode": "full"}
        {"alphabet": [...], "mode": "forbidden", "forbidden": ["aa"]}
        {"alphabet": [...], "mode": "graph", "nodes": [...],
         "edges": [[s, q, sym], ...], "finite_type_order": 1}
    """
    if isinstance(spec, str):
        return builtin_shift(spec)
    if not isinstance(spec, Mapping):
        raise InvalidInputError("shift spec must be a name or an object")
    if "builtin" in spec:
        if spec["builtin"] == "full" and "alphabet" in spec:
            return make_full_shift(Alphabet(tuple(spec["alphabet"])))
        return builtin_shift(spec["builtin"])
    if "alphabet" not in spec:
        raise InvalidInputError("shift spec needs an alphabet")
    alphabet = Alphabet(tuple(spec["alphabet"]))
    mode = spec.get("mode", "full")
    if mode == "full":
        return make_full_shift(alphabet)
    if mode == "forbidden":
        return make_finite_type_shift(alphabet, spec.get("forbidden", []))
    if mode == "graph":
        nodes = tuple(spec["nodes"])
        edges = tuple(tuple(e) for e in spec["edges"])
        return shift_from_graph(LabeledGraph(alphabet, nodes, edges),
                                finite_type_order=spec.get("finite_type_order"),
                                name=spec.get("name"))
    raise InvalidInputError(f"unknown shift mode {mode!r}")


def all_words(alphabet: Alphabet, n: int):
    """Every word of length ``n`` (brute-force enumeration helper)."""
    return (tuple(w) for w in itertools.product(alphabet.symbols, repeat=n))
