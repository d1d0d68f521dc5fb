import itertools

import pytest
from hypothesis import given, settings, strategies as st

from soficlyap.errors import EmptyShiftError, InvalidInputError
from soficlyap.shift import (
    AB, INTEGER_LINE_ALPHABET, Alphabet, LabeledGraph, all_words, are_isomorphic,
    graph_predicates, integer_line_shift, is_admissible, language,
    make_finite_type_shift, make_full_shift, reverse_shift, shift_from_graph, shift_from_spec,
    shifts_equal, transpose,
)
from soficlyap.debruijn import de_bruijn


def test_full_shift_counts():
    s = make_full_shift(AB)
    assert len(s.presentation.nodes) == 1
    assert len(s.presentation.edges) == 2
    assert len(language(s, 3)) == 8
    assert len(language(make_full_shift(Alphabet("abc")), 2)) == 9


def test_singleton_alphabet():
    s = make_full_shift(Alphabet("a"))
    for n in range(1, 6):
        assert language(s, n) == (("a",) * n,)


def test_empty_alphabet_rejected():
    with pytest.raises(InvalidInputError):
        Alphabet(())


def test_golden_mean(golden):
    assert not is_admissible(golden, "aa")
    assert is_admissible(golden, "aba")
    assert set(language(golden, 2)) == {("a", "b"), ("b", "a"), ("b", "b")}
    assert len(language(golden, 4)) == 8


def test_no_forbidden_is_full():
    s = make_finite_type_shift(AB, [])
    full = make_full_shift(AB)
    for n in range(1, 8):
        assert language(s, n) == language(full, n)


def test_forbidden_outside_alphabet():
    with pytest.raises(InvalidInputError):
        make_finite_type_shift(AB, ["ac"])


def test_everything_forbidden_is_empty():
    with pytest.raises(EmptyShiftError):
        make_finite_type_shift(AB, ["a", "b"])
    with pytest.raises(EmptyShiftError):
        make_finite_type_shift(AB, ["aa", "ab", "ba", "bb"])


def test_fibonacci_counts(golden):
    c = [None, 2, 3]
    for n in range(3, 13):
        c.append(c[-1] + c[-2])
    for n in range(1, 13):
        brute = sum(1 for w in all_words(AB, n) if "".join(w).find("aa") < 0)
        assert len(language(golden, n)) == c[n] == brute


@pytest.mark.parametrize("name", ["full", "golden-mean", "integer-line"])
def test_factor_closure(name):
    s = shift_from_spec(name)
    for n in range(1, 7):
        short = set(language(s, n))
        for w in language(s, n + 1):
            assert w[1:] in short and w[:-1] in short


def test_predicates_single_node():
    g = LabeledGraph(AB, ("x",), ())
    p = graph_predicates(g)
    assert p.deterministic and not p.complete and p.strongly_connected


def test_memory_and_future_predicates(full):
    p0 = graph_predicates(de_bruijn(full, 2, 0).graph)
    p2 = graph_predicates(de_bruijn(full, 2, 2).graph)
    assert p0.deterministic and p0.complete
    assert p2.co_deterministic and p2.co_complete


@pytest.mark.parametrize("K,k", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 1)])
def test_transpose_swaps_predicates(golden, full, K, k):
    for s in (golden, full):
        g = de_bruijn(s, K, k).graph
        p, pt = graph_predicates(g), graph_predicates(transpose(g))
        assert pt.deterministic == p.co_deterministic
        assert pt.complete == p.co_complete
        assert pt.co_deterministic == p.deterministic


def test_two_presentations_not_isomorphic():
    left = LabeledGraph(AB, (1, 2), ((1, 1, "a"), (1, 2, "b"), (2, 1, "a"), (2, 2, "b")))
    right = LabeledGraph(AB, (1, 2), ((1, 2, "a"), (1, 2, "b"), (2, 1, "a"), (2, 1, "b")))
    assert shifts_equal(shift_from_graph(left), shift_from_graph(right), 8)
    assert are_isomorphic(left, right) is None


def test_isomorphism_identity_and_transpose(full):
    g0 = de_bruijn(full, 2, 0).graph
    g2 = de_bruijn(full, 2, 2).graph
    m = are_isomorphic(g0, g0)
    assert m == {s: s for s in g0.nodes}
    m = are_isomorphic(transpose(g0), g2)
    assert m is not None
    assert {(m[s], m[q], h) for s, q, h in transpose(g0).edges} == set(g2.edges)


@settings(max_examples=25, deadline=None)
@given(st.permutations(list(range(4))), st.sampled_from([(2, 0), (2, 1), (2, 2), (3, 1)]))
def test_isomorphism_relabeling(perm, Kk):
    g = de_bruijn(make_finite_type_shift(AB, ["aa"]), *Kk).graph
    nodes = list(g.nodes)
    names = {s: f"n{perm[i % 4]}_{i}" for i, s in enumerate(nodes)}
    h = g.relabeled(names)
    assert are_isomorphic(g, h) is not None
    assert are_isomorphic(h, g) is not None


def test_shift_equality(golden, full):
    assert shifts_equal(de_bruijn(golden, 1, 0).as_shift(), de_bruijn(golden, 2, 1).as_shift(), 12)
    assert not shifts_equal(golden, full, 2)
    line = integer_line_shift()
    assert not shifts_equal(line, make_full_shift(INTEGER_LINE_ALPHABET), 2)
    assert ("∘", "∘") not in language(line, 2)


def test_reverse_shift(golden):
    s = make_finite_type_shift(AB, ["ab"])
    r = reverse_shift(s)
    assert not is_admissible(r, "ba") and is_admissible(r, "ab")
    assert shifts_equal(reverse_shift(golden), golden, 8)


def test_spec_forms():
    s = shift_from_spec({"alphabet": ["a", "b"], "mode": "forbidden", "forbidden": ["aa"]})
    assert len(language(s, 4)) == 8
    s = shift_from_spec({"alphabet": ["x", "y"], "mode": "graph", "nodes": [0, 1],
                         "edges": [[0, 1, "x"], [1, 0, "y"]]})
    assert len(language(s, 5)) == 2
    with pytest.raises(InvalidInputError):
        shift_from_spec({"alphabet": ["a"], "mode": "weird"})
    with pytest.raises(InvalidInputError):
        shift_from_spec("nope")
