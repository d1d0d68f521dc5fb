import numpy as np
import pytest

from soficlyap.debruijn import de_bruijn
from soficlyap.errors import DegenerateCertificateError, InadmissibleWordError
from soficlyap.jsr import (
    best_cycle, check_decrease, check_ues_bound, closed_walks, converse_quadratic, random_trajectories,
    rho_lower, simulate, spectral_radius, trajectory_from_word, transition_matrix,
)
from soficlyap.shift import AB, Alphabet, make_full_shift
from soficlyap.solver.bisect import rho_upper
from soficlyap.system import SwitchedSystem
from soficlyap.templates import Certificate, Template


@pytest.fixture(scope="module")
def g22(positive):
    db = de_bruijn(positive.shift, 2, 2)
    return db, rho_upper(positive, db, "copositive-linear")


@pytest.fixture(scope="module")
def scaled(positive):
    s = positive.scaled(1 / 1.2)
    db = de_bruijn(s.shift, 2, 2)
    return s, db, rho_upper(s, db, "copositive-linear")


def test_transition_matrix(positive, golden):
    A, B = positive["a"], positive["b"]
    np.testing.assert_array_equal(transition_matrix(positive, ""), np.eye(3))
    np.testing.assert_allclose(transition_matrix(positive, "ab"), B @ A)
    with pytest.raises(InadmissibleWordError):
        transition_matrix(positive, "aa")


def test_semigroup(full):
    rng = np.random.default_rng(0)
    s = SwitchedSystem(full, {h: rng.standard_normal((2, 2)) for h in AB})
    for _ in range(20):
        w1 = "".join(rng.choice(["a", "b"], rng.integers(0, 5)))
        w2 = "".join(rng.choice(["a", "b"], rng.integers(0, 5)))
        np.testing.assert_allclose(transition_matrix(s, w1 + w2),
                                   transition_matrix(s, w2) @ transition_matrix(s, w1), atol=1e-12)


def test_rho_lower_examples(positive, full, golden):
    s = SwitchedSystem(full, {"a": [[0.5]], "b": [[0.25]]})
    assert rho_lower(s, 8) == pytest.approx(0.5)
    assert rho_lower(SwitchedSystem(golden, {h: np.eye(2) for h in AB}), 6) == pytest.approx(1.0)
    assert rho_lower(positive, 8) <= 1.0944 + 1e-3


def test_rho_lower_monotone(golden):
    rng = np.random.default_rng(1)
    for _ in range(5):
        s = SwitchedSystem(golden, {h: rng.standard_normal((2, 2)) for h in AB})
        vals = [rho_lower(s, L) for L in range(1, 9)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_closed_walks_admissible(golden):
    s = SwitchedSystem(golden, {h: np.eye(1) for h in AB})
    walks, prods = closed_walks(s, 6)
    assert len(walks) == len(prods) > 0
    assert ("b",) in walks and ("a", "b") in walks
    for w in walks:
        assert len(w) <= 6
        cyc = tuple(w) + tuple(w)
        assert all(cyc[i:i + 2] != ("a", "a") for i in range(len(cyc) - 1))


def test_best_cycle_prefers_shortest(positive):
    word, rate = best_cycle(positive, 8)
    assert word == ("b",) and rate == pytest.approx(rho_lower(positive, 8))


def test_spectral_radius():
    assert spectral_radius(np.array([[0.0, 2.0], [0.5, 0.0]])) == pytest.approx(1.0)
    assert spectral_radius(np.array([[0.0, -1.0], [1.0, 0.0]])) == pytest.approx(1.0)


def test_converse_scaled(positive):
    s = positive.scaled(1 / 1.2)
    ok = [converse_quadratic(s, K, 0.99).ok for K in range(1, 13)]
    assert any(ok)
    K = ok.index(True) + 1
    res = converse_quadratic(s, K, 0.99)
    for Q in res.certificate.params.values():
        assert np.linalg.eigvalsh(Q).min() >= 1 - 1e-9
    assert res.graph.graph_id == f"debruijn:{K},{K}"


def test_converse_memory(positive):
    s = positive.scaled(1 / 1.2)
    assert any(converse_quadratic(s, K, 0.99, position="memory").ok for K in range(1, 13))


def test_converse_zero_matrices(full):
    s = SwitchedSystem(full, {h: np.zeros((2, 2)) for h in AB})
    res = converse_quadratic(s, 1, 0.5)
    assert res.ok
    for Q in res.certificate.params.values():
        np.testing.assert_array_equal(Q, np.eye(2))


def test_converse_unstable(positive):
    assert not converse_quadratic(positive, 12, 0.99).ok


def test_converse_degenerate(positive):
    with pytest.raises(DegenerateCertificateError):
        converse_quadratic(positive, 0, 0.99)


def test_simulate_basics(golden, positive):
    tr = simulate(positive, np.ones(3), 0)
    assert tr.states.shape == (1, 3)
    ident = SwitchedSystem(golden, {h: np.eye(2) for h in AB})
    tr = simulate(ident, [1.0, -2.0], 30, seed=4)
    assert np.all(tr.states == np.array([1.0, -2.0]))
    for seed in range(20):
        w = "".join(simulate(positive, np.ones(3), 60, seed=seed).word)
        assert "aa" not in w


def test_simulate_deterministic(positive):
    a = simulate(positive, np.ones(3), 40, seed=7)
    b = simulate(positive, np.ones(3), 40, seed=7)
    assert a.word == b.word and np.array_equal(a.states, b.states)


def test_decrease_table_certificate(positive, g22):
    db, rep = g22
    trs = random_trajectories(positive, 100, 50, seed=0)
    cert = rep.certificate.with_gamma(1.0945)
    r = check_decrease(cert, positive, trs, db)
    assert r.ok and r.edge_mismatches == 0 and r.checked > 0
    assert not check_decrease(cert.with_gamma(1.0), positive, trs, db).ok


def test_decrease_identity(golden):
    s = SwitchedSystem(golden, {h: np.eye(2) for h in AB})
    db = de_bruijn(golden, 1, 0)
    cert = Certificate(Template("copositive-linear", 2), {w: np.ones(2) for w in db.nodes}, 1.0, db.graph_id)
    assert check_decrease(cert, s, random_trajectories(s, 10, 20)).ok


def test_path_matches_windows(positive, g22):
    db, rep = g22
    for K, k in [(1, 0), (2, 1), (2, 0), (3, 2)]:
        d = de_bruijn(positive.shift, K, k)
        cert = Certificate(Template("copositive-linear", 3), {w: np.ones(3) for w in d.nodes}, 10.0, d.graph_id)
        r = check_decrease(cert, positive, random_trajectories(positive, 20, 30, seed=K + k), d)
        assert r.edge_mismatches == 0


def test_ues_scaled(scaled):
    s, db, rep = scaled
    trs = random_trajectories(s, 1000, 40, seed=2)
    r = check_ues_bound(s, rep.certificate, trs)
    assert r.ok and r.constant == pytest.approx(rep.certificate.margins[1] / rep.certificate.margins[0])


def test_ues_zero(full):
    s = SwitchedSystem(full, {h: np.zeros((2, 2)) for h in AB})
    cert = Certificate(Template("full-quadratic", 2), {(): np.eye(2)}, 0.5)
    assert check_ues_bound(s, cert, random_trajectories(s, 10, 5)).ok


def test_ues_unstable(positive, g22):
    db, rep = g22
    trs = random_trajectories(positive, 200, 60, seed=3)
    assert not check_ues_bound(positive, rep.certificate, trs, M=10.0, gamma=0.99).ok


def test_trajectory_from_word(positive):
    tr = trajectory_from_word(positive, np.ones(3), "bab")
    np.testing.assert_allclose(tr.states[-1], transition_matrix(positive, "bab") @ np.ones(3))
