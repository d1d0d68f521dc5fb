import numpy as np

from soficlyap import emit as E
from soficlyap.debruijn import de_bruijn
from soficlyap.experiments import (
    INCONCLUSIVE, ExperimentConfig, classify, region_names, run_venn, sample_system,
)
from soficlyap.solver.bisect import rho_upper
from soficlyap.system import SwitchedSystem, positive_golden_mean_system

GRAPHS = ((2, 0), (2, 1), (2, 2))


def test_classify():
    assert classify((1.0, 1.0005, 1.0009), 1e-3, GRAPHS) == "all"
    assert classify((1.0, 1.1, 1.2), 1e-3, GRAPHS) == "G20 only"
    assert classify((1.1, 1.0, 1.0), 1e-3, GRAPHS) == "G21+G22"
    assert len(region_names(GRAPHS)) == 7


def test_venn_deterministic():
    cfg = ExperimentConfig(sample_count=4, seed=5)
    a, b = run_venn(cfg), run_venn(cfg)
    assert E.venn_samples_csv(a) == E.venn_samples_csv(b)
    assert a.total == 4
    assert set(a.counts) == set(region_names(GRAPHS)) | {INCONCLUSIVE}


def test_samples_are_independent_of_count():
    a = sample_system(ExperimentConfig(sample_count=10), 3)
    b = sample_system(ExperimentConfig(sample_count=1000), 3)
    for h in "ab":
        np.testing.assert_array_equal(a[h], b[h])


def test_insertion_order_invariance():
    s = positive_golden_mean_system()
    t = SwitchedSystem(s.shift, {"b": s["b"], "a": s["a"]})
    db = de_bruijn(s.shift, 2, 1)
    assert rho_upper(s, db, "copositive-linear").rho_upper == rho_upper(t, db, "copositive-linear").rho_upper
