"""
Test conditional-distribution inference
CDF, pmf, mean and median from whole-data and combined fits
"""
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
from scipy import special

from bigcpm.analysis.inference import (ConditionalDistribution, conditional_cdf_table,
                                       conditional_distribution, conditional_mean,
                                       conditional_median, predict)
from bigcpm.combine.engine import fit_divide_combine
from bigcpm.core.data import Dataset
from bigcpm.core.model import fit_cpm
from bigcpm.errors import ArgumentError
from bigcpm.simulate.scenarios import ScenarioSpec, simulate_dataset
from suite import run_suite


def distribution(cdf, grid=(1.0, 2.0, 3.0)):
    cdf = np.asarray(cdf, dtype=float)
    return ConditionalDistribution(grid=np.asarray(grid, dtype=float), cdf=cdf,
                                   pmf=np.diff(cdf, prepend=0.0))


def test_median_and_mean_rules():
    print("\n[TEST] Testing Median and Mean Rules")
    print("=" * 40)

    assert conditional_median(distribution([0.2, 0.6, 1.0])) == 1.5
    assert conditional_median(distribution([0.5, 0.9, 1.0])) == 1.0
    assert conditional_median(distribution([0.7, 0.9, 1.0])) == 1.0
    assert conditional_median(distribution([0.1, 0.3, 1.0])) == 3.0
    assert conditional_median(distribution([0.1, 0.5, 1.0])) == 2.0
    print("  straddling pair, exact 0.5 and both ends: [PASS]")

    assert conditional_mean(distribution([0.0, 1.0, 1.0], grid=(4.0, 7.5, 9.0))) == 7.5
    assert abs(conditional_mean(distribution([1 / 3, 2 / 3, 1.0])) - 2.0) < 1e-12
    print("[PASS] point mass and uniform means")


def test_no_covariate_fit_gives_empirical_cdf():
    print("\n[TEST] Testing Empirical CDF Recovery")
    print("=" * 40)

    y = np.array([3.0, 1.0, 2.0, 2.0, 5.0])
    fit = fit_cpm(Dataset(y, np.empty((5, 0))))
    dist = conditional_distribution(fit, [])
    assert np.allclose(dist.cdf, [0.2, 0.6, 0.8, 1.0], atol=1e-8)
    assert list(dist.grid) == [1.0, 2.0, 3.0, 5.0]
    assert abs(dist.pmf.sum() - 1.0) < 1e-12
    print("[PASS] p = 0 reproduces the empirical CDF")


def test_cdf_tracks_truth():
    """Identity transform with logistic noise: true CDF is expit(y - beta'x0)"""
    print("\n[TEST] Testing Conditional CDF Accuracy")
    print("=" * 40)

    spec = ScenarioSpec(N=1000, p=2, seed=3)
    sim = simulate_dataset(spec)
    fit = fit_cpm(sim.data, spec.link)
    # x1 is binary with success probability 0.05; stay on rows the data support
    assert sim.data.X[:, 0].mean() < 0.1
    rows = (np.array([0.0, 0.5]), np.array([0.0, -1.0]), np.array([0.0, 1.2]), sim.data.X.mean(axis=0))
    for x0 in rows:
        dist = conditional_distribution(fit, x0)
        truth = special.expit(dist.grid - sim.beta @ x0)
        assert np.max(np.abs(dist.cdf - truth)) < 0.08, x0
        assert abs(dist.pmf.sum() - 1.0) < 1e-12
        assert np.all(np.diff(dist.cdf) >= 0)
    print("[PASS] sup distance to the true CDF below 0.08")


def test_prediction_tables():
    print("\n[TEST] Testing Prediction Tables")
    print("=" * 40)

    sim = simulate_dataset(ScenarioSpec(N=600, p=3, seed=8))
    whole = fit_cpm(sim.data)
    combined = fit_divide_combine(sim.data, 3, rng=np.random.default_rng(1))
    X0 = sim.data.X[:4]

    for fit in (whole, combined):
        table = predict(fit, X0, sim.data.names)
        assert list(table.columns) == ["row", "x1", "x2", "x3", "mean", "median", "p_lowest", "p_highest"]
        assert len(table) == 4 and list(table["row"]) == [1, 2, 3, 4]
        assert np.all(table["median"].between(fit.distinct[0], fit.distinct[-1]))

        long = conditional_cdf_table(fit, X0)
        assert len(long) == 4 * fit.M
        assert np.allclose(long.groupby("row")["pmf"].sum(), 1.0, atol=1e-12)

    try:
        conditional_distribution(whole, [1.0, 2.0])
        raise AssertionError("wrong covariate length should be rejected")
    except ArgumentError:
        pass
    print("[PASS] whole and combined fits predict alike")


if __name__ == "__main__":
    success = run_suite("bigcpm Inference Test Suite", [
        test_median_and_mean_rules,
        test_no_covariate_fit_gives_empirical_cdf,
        test_cdf_tracks_truth,
        test_prediction_tables,
    ])
    sys.exit(0 if success else 1)
