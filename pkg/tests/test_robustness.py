import math

import numpy as np
import pytest
from sklearn.isotonic import IsotonicRegression

from obsnet import InfeasibleError, design, failure_curve, network_fails
from obsnet.robustness import derive_seed, failure_curves, splitmix64

from _instances import t2, t3


def test_splitmix_reference_values():
    # first outputs of the reference generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert derive_seed(1, 2) == splitmix64(splitmix64(1) ^ 2)


def test_network_fails_examples():
    sol = design(t3(), 0)
    assert not network_fails(sol, set())
    assert network_fails(sol, {"x1"})
    assert not network_fails(sol, {"x2"})
    assert network_fails(sol, {sol.graph.node("x1")})
    assert not network_fails(design(t2(), 1), [])


def test_guarantee_region_and_csv_shape():
    curve = failure_curve(12, 3, math.sqrt(2), k=2, n_graphs=3, n_trials=50, seed=9)
    assert [p.l for p in curve.points] == list(range(7))
    assert all(p.prob == 0 for p in curve.points if p.l <= 2)
    lines = curve.to_csv().splitlines()
    assert lines[0] == "l,ratio,prob,trials,graphs"
    assert lines[3] == "2,0.166667,0.000000,50,3"


def test_reproducible():
    a = failure_curve(10, 2, math.sqrt(2), k=1, n_graphs=1, n_trials=1, seed=4).to_csv()
    b = failure_curve(10, 2, math.sqrt(2), k=1, n_graphs=1, n_trials=1, seed=4).to_csv()
    assert a == b


def test_unreachable_k():
    with pytest.raises(InfeasibleError):
        failure_curve(3, 1, 0.3, k=5, n_graphs=1, n_trials=1, seed=0)


def test_nearly_monotone_in_failures():
    curve = failure_curve(14, 3, math.sqrt(2), k=1, n_graphs=10, n_trials=1000, seed=21)
    ls = np.array([p.l for p in curve.points], dtype=float)
    probs = np.array([p.prob for p in curve.points])
    fit = IsotonicRegression(increasing=True).fit_transform(ls, probs)
    assert np.max(np.abs(fit - probs)) <= 0.05


def test_higher_k_is_no_worse():
    curves = failure_curves(14, 3, math.sqrt(2), ks=(0, 2), n_graphs=6, n_trials=300, seed=5)
    for lo, hi in zip(curves[0].points, curves[2].points):
        assert hi.prob <= lo.prob + 2 * math.hypot(lo.std_error, hi.std_error) + 1e-12
