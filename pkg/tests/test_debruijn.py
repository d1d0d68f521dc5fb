import itertools

import pytest

from soficlyap.debruijn import (
    CylinderCovering, check_nonredundant, covering_classes, de_bruijn, successor_map,
    to_dot, verify_covering,
)
from soficlyap.errors import InvalidInputError, InvalidPositionError, OrderTooSmallError
from soficlyap.shift import (
    AB, Cylinder, LabeledGraph, are_isomorphic, graph_predicates, language,
    make_finite_type_shift, make_full_shift, reverse_shift, shifts_equal, transpose,
)


def test_full_shift_order_two(full):
    for k in range(3):
        db = de_bruijn(full, 2, k)
        assert len(db.nodes) == 4 and len(db.edges) == 8
    g = de_bruijn(full, 2, 1).graph
    assert (("a", "a"), ("a", "b"), "a") in g.edges


def test_golden_counts(golden):
    db = de_bruijn(golden, 1, 0)
    assert (len(db.nodes), len(db.edges)) == (2, 3)
    for k in range(3):
        db = de_bruijn(golden, 2, k)
        assert set(db.nodes) == {("a", "b"), ("b", "a"), ("b", "b")}
        assert len(db.edges) == 5
    for k in range(4):
        db = de_bruijn(golden, 3, k)
        assert (len(db.nodes), len(db.edges)) == (5, 8)


def test_no_aa_edge_at_order_one(golden):
    g = de_bruijn(golden, 1, 0).graph
    assert (("a",), ("a",), "a") not in g.edges


def test_future_graph_edges(golden):
    # G_{2,2}: label is the first symbol of the source window
    edges = {(("a", "b"), ("b", "a"), "a"), (("a", "b"), ("b", "b"), "a"),
             (("b", "a"), ("a", "b"), "b"), (("b", "b"), ("b", "a"), "b"),
             (("b", "b"), ("b", "b"), "b")}
    assert set(de_bruijn(golden, 2, 2).edges) == edges


def test_errors(golden):
    with pytest.raises(OrderTooSmallError):
        de_bruijn(golden, 0, 0)
    with pytest.raises(InvalidPositionError):
        de_bruijn(golden, 2, 3)
    with pytest.raises(InvalidInputError):
        successor_map(de_bruijn(golden, 2, 0), ("a", "a"), "a")


@pytest.mark.parametrize("forbidden", [[], ["aa"], ["ab"], ["aab", "bb"]])
def test_counts_match_language(forbidden):
    s = make_finite_type_shift(AB, forbidden)
    M = s.finite_type_order or 0
    for K in range(max(M, 1), 7):
        counts = set()
        for k in range(K + 1):
            db = de_bruijn(s, K, k)
            assert len(db.nodes) == len(language(s, K))
            assert len(db.edges) == len(language(s, K + 1))
            counts.add(len(db.edges))
        assert len(counts) == 1


@pytest.mark.parametrize("forbidden", [[], ["aa"], ["aab"]])
@pytest.mark.parametrize("K", [2, 3])
def test_transpose_is_reversed_position(forbidden, K):
    s = make_finite_type_shift(AB, forbidden)
    r = reverse_shift(s)
    for k in range(K + 1):
        t = transpose(de_bruijn(s, K, k).graph)
        other = de_bruijn(r, K, K - k).graph
        assert are_isomorphic(t, other) is not None


def test_transpose_full_shift(full):
    assert are_isomorphic(transpose(de_bruijn(full, 2, 0).graph), de_bruijn(full, 2, 2).graph) is not None


def test_memory_future_predicates(golden, full):
    for s in (golden, full):
        for K in (1, 2, 3):
            assert graph_predicates(de_bruijn(s, K, 0).graph).deterministic
            assert graph_predicates(de_bruijn(s, K, K).graph).co_deterministic
    assert graph_predicates(de_bruijn(full, 3, 0).graph).complete


@pytest.mark.parametrize("K,k", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 2)])
def test_presented_shift_is_base(golden, full, K, k):
    for s in (golden, full):
        assert shifts_equal(s, de_bruijn(s, K, k).as_shift(), 2 * K + 2)


def test_covering_classes(golden, full):
    cls = {c.node: c.cylinder for c in covering_classes(de_bruijn(full, 2, 0))}
    assert cls[("a", "b")] == Cylinder(("a", "b"), -2)
    cls = {c.node: c.cylinder for c in covering_classes(de_bruijn(full, 2, 2))}
    assert cls[("a", "b")] == Cylinder(("a", "b"), 0)
    cls = {c.node: c.cylinder for c in covering_classes(de_bruijn(full, 2, 1))}
    assert cls[("a", "b")].start == -1 and cls[("a", "b")].end == 0


def test_successor_maps(full, golden):
    g = de_bruijn(full, 1, 0)
    for s in g.nodes:
        assert successor_map(g, s, "a") == (("a",),)
    g = de_bruijn(golden, 2, 2)
    assert set(successor_map(g, ("b", "b"), "b")) == {("b", "a"), ("b", "b")}
    for s in (golden, full):
        db = de_bruijn(s, 3, 0)
        for node in db.nodes:
            for i in AB:
                assert len(successor_map(db, node, i)) <= 1


@pytest.mark.parametrize("K,k", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)])
def test_verify_de_bruijn_coverings(golden, full, K, k):
    for s in (golden, full):
        db = de_bruijn(s, K, k)
        assert verify_covering(db, 2 * K).ok
        assert check_nonredundant(db)


def test_one_node_full_shift_covering(full):
    cov = CylinderCovering(full, full.presentation, {(): Cylinder((), 0)})
    assert verify_covering(cov, 1).ok
    assert check_nonredundant(cov)


def test_lagged_covering_is_not_graph_induced(full):
    c1, c2 = Cylinder(("a",), -2), Cylinder(("b",), -2)
    nodes = (1, 2)
    slots = [(s, i) for s in nodes for i in AB]
    subsets = [(), (1,), (2,), (1, 2)]
    accepted = 0
    for choice in itertools.product(subsets, repeat=len(slots)):
        edges = [(s, q, i) for (s, i), qs in zip(slots, choice) for q in qs]
        g = LabeledGraph(AB, nodes, tuple(edges))
        cov = CylinderCovering(full, g, {1: c1, 2: c2})
        accepted += verify_covering(cov, 3).ok
    assert accepted == 0


def test_duplicated_classes_are_redundant(full):
    g = LabeledGraph(AB, (1, 2), ((1, 1, "a"), (1, 2, "b"), (2, 1, "a"), (2, 2, "b")))
    cov = CylinderCovering(full, g, {1: Cylinder((), 0), 2: Cylinder((), 0)})
    assert not check_nonredundant(cov)


def test_dot_edge_lines(golden):
    db = de_bruijn(golden, 2, 1)
    text = to_dot(db.graph, db.graph_id)
    assert sum("->" in line for line in text.splitlines()) == len(db.edges)
