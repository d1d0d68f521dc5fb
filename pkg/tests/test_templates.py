import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from soficlyap.debruijn import de_bruijn
from soficlyap.errors import InvalidCertificateError, TemplateMismatchError
from soficlyap.shift import AB, make_full_shift, transpose
from soficlyap.solver.bisect import check_gamma, rho_upper
from soficlyap.system import SwitchedSystem
from soficlyap.templates import (
    Certificate, Template, TemplateKind, dualize, encode, evaluate, validate_certificate,
)

from conftest import random_nonnegative

COP = Template(TemplateKind.COPOSITIVE_LINEAR, 3)


@pytest.fixture(scope="module")
def g22_report(positive):
    return rho_upper(positive, de_bruijn(positive.shift, 2, 2), "copositive-linear")


def test_evaluate_examples():
    assert evaluate(COP, [1, 2, 3], [1, -1, 1]) == pytest.approx(6)
    assert evaluate(Template("diagonal-quadratic", 2), [4, 9], [1, 1]) == pytest.approx(np.sqrt(13))
    assert evaluate(Template("weighted-linf", 2), [2, 5], [-4, 5]) == pytest.approx(2)


def test_nonpositive_parameter_rejected():
    with pytest.raises(InvalidCertificateError):
        evaluate(COP, [1, 0, 3], [1, 1, 1])
    with pytest.raises(InvalidCertificateError):
        evaluate(Template("full-quadratic", 2), [[1, 0], [0, -1]], [1, 1])


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(list(TemplateKind)),
       st.lists(st.floats(-5, 5), min_size=3, max_size=3),
       st.floats(0, 20))
def test_homogeneity(kind, x, c):
    t = Template(kind, 3)
    p = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.5]]) if kind is TemplateKind.FULL_QUADRATIC \
        else np.array([0.5, 1.5, 2.0])
    x = np.array(x)
    assert evaluate(t, p, c * x) == pytest.approx(c * evaluate(t, p, x), rel=1e-9, abs=1e-9)


def test_dual_norm_pairing():
    rng = np.random.default_rng(3)
    lin = Template("copositive-linear", 4)
    inf = Template("weighted-linf", 4)
    for _ in range(200):
        v = rng.uniform(0.1, 3, 4)
        x = rng.standard_normal(4)
        y = rng.standard_normal(4)
        y /= evaluate(lin, v, y)
        assert y @ x <= evaluate(inf, v, x) + 1e-12
        i = np.argmax(np.abs(x) / v)
        y_star = np.zeros(4)
        y_star[i] = np.sign(x[i]) / v[i]
        assert evaluate(lin, v, y_star) == pytest.approx(1)
        assert y_star @ x == pytest.approx(evaluate(inf, v, x))


def test_encoding_shape(positive):
    g = de_bruijn(positive.shift, 2, 2).graph
    cs = encode(positive, g, COP, 1.1)
    assert cs.num_vars == 9
    assert cs.A_ub.shape == (15, 9)
    assert all(len(cs.provenance[e]) == 3 for e in g.edges)
    assert cs.A_eq.shape == (1, 9)


def test_common_quadratic_encoding():
    rng = np.random.default_rng(0)
    s = SwitchedSystem(make_full_shift(AB), {h: rng.standard_normal((2, 2)) for h in AB})
    g = de_bruijn(s.shift, 0, 0).graph
    cs = encode(s, g, Template("full-quadratic", 2), 2.0)
    assert len(g.nodes) == 1 and cs.num_vars == 3
    edge_blocks = [b for b in cs.lmi_blocks if b.key[0] != "node"]
    assert len(edge_blocks) == 2


def test_identity_dynamics(golden):
    s = SwitchedSystem(golden, {h: np.eye(2) for h in AB})
    g = de_bruijn(golden, 1, 0).graph
    cs = encode(s, g, Template("copositive-linear", 2), 1.0)
    x = np.ones(cs.num_vars)
    assert cs.satisfied(x)
    cert = cs.to_certificate(x)
    assert validate_certificate(s, g, cert).ok
    assert check_gamma(s, g, Template("copositive-linear", 2), 1.0).feasible


def test_negative_entries_rejected(golden):
    s = SwitchedSystem(golden, {"a": -np.eye(2), "b": np.eye(2)})
    with pytest.raises(TemplateMismatchError):
        encode(s, de_bruijn(golden, 1, 0).graph, Template("copositive-linear", 2), 1.0)


@pytest.mark.parametrize("kind", ["copositive-linear", "weighted-linf", "diagonal-quadratic"])
def test_encode_validate_consistency(kind, golden):
    rng = np.random.default_rng(11)
    agree = decided = 0
    for trial in range(60):
        K, k = [(1, 0), (1, 1), (2, 1), (2, 2)][trial % 4]
        g = de_bruijn(golden, K, k).graph
        s = random_nonnegative(golden, 2, rng)
        t = Template(kind, 2)
        cs = encode(s, g, t, rng.uniform(0.5, 3.0), margin=0.0)
        x = rng.uniform(0.2, 2.0, cs.num_vars)
        x *= cs.b_eq[0] / (cs.A_eq[0] @ x)
        cert = cs.to_certificate(x)
        rep = validate_certificate(s, g, cert)
        if abs(rep.worst_slack) < 1e-6:
            continue
        decided += 1
        agree += rep.ok == cs.satisfied(x)
    assert decided > 40 and agree == decided


def test_table_certificate_validates(g22_report, positive):
    g = de_bruijn(positive.shift, 2, 2).graph
    cert = g22_report.certificate.with_gamma(1.0945)
    assert validate_certificate(positive, g, cert).ok
    assert not validate_certificate(positive, g, cert.with_gamma(1.09)).ok


def test_node_mismatch(g22_report, positive):
    with pytest.raises(InvalidCertificateError):
        validate_certificate(positive, de_bruijn(positive.shift, 2, 0).graph.subgraph([("a", "b")]),
                             g22_report.certificate)


def test_sampled_mode_agrees(g22_report, positive):
    g = de_bruijn(positive.shift, 2, 2).graph
    assert validate_certificate(positive, g, g22_report.certificate, mode="sampled").ok


def test_dual_certificate(g22_report, positive):
    g = de_bruijn(positive.shift, 2, 2).graph
    ds, dg, dc = dualize(positive, g, g22_report.certificate)
    assert dc.template.kind is TemplateKind.WEIGHTED_LINF
    assert set(dg.edges) == set(transpose(g).edges)
    np.testing.assert_array_equal(ds["a"], positive["a"].T)
    assert validate_certificate(ds, dg, dc).ok
    back = dualize(ds, dg, dc)
    assert back[2].template == g22_report.certificate.template
    assert validate_certificate(positive, g, back[2]).ok


def test_quadratic_duals():
    s = SwitchedSystem(make_full_shift(AB), {h: np.eye(2) for h in AB})
    g = s.shift.presentation
    c = Certificate(Template("full-quadratic", 2), {(): np.eye(2)}, 1.0)
    _, _, d = dualize(s, g, c)
    np.testing.assert_array_equal(d.params[()], np.eye(2))
    c = Certificate(Template("diagonal-quadratic", 2), {(): [4.0, 1.0]}, 1.0)
    _, _, d = dualize(s, g, c)
    np.testing.assert_allclose(d.params[()], [0.25, 1.0])


def test_quadratic_dual_round_trip():
    rng = np.random.default_rng(5)
    s = SwitchedSystem(make_full_shift(AB), {h: 0.4 * rng.standard_normal((2, 2)) for h in AB})
    db = de_bruijn(s.shift, 2, 1)
    rep = rho_upper(s, db, "full-quadratic")
    _, dg, dc = dualize(s, db.graph, rep.certificate)
    assert validate_certificate(s.dual(), dg, dc, tol=1e-7).ok
    _, g2, c2 = dualize(s.dual(), dg, dc)
    assert validate_certificate(s, g2, c2, tol=1e-7).ok


def test_lp_duality_feasibility(golden):
    rng = np.random.default_rng(8)
    for trial in range(30):
        s = random_nonnegative(golden, 3, rng)
        db = de_bruijn(golden, *[(1, 0), (2, 1), (2, 0)][trial % 3])
        gamma = rng.uniform(0.8, 2.0)
        a = check_gamma(s, db.graph, Template("copositive-linear", 3), gamma).feasible
        b = check_gamma(s.dual(), transpose(db.graph), Template("weighted-linf", 3), gamma).feasible
        assert a == b
