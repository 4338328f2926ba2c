"""
Test scenario simulation
Design layout, transforms, determinism and Monte Carlo truth
"""
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np

from bigcpm.core.link import LinkFamily
from bigcpm.errors import ArgumentError
from bigcpm.simulate import (AlphaTruth, Residual, ScenarioSpec, Transform, default_beta,
                             simulate_dataset, true_conditional)
from suite import run_suite

EULER_GAMMA = 0.5772156649


def test_default_beta_and_design():
    print("\n[TEST] Testing Default Coefficients and Design")
    print("=" * 40)

    assert np.allclose(default_beta(5), [0.1, 0.0, -0.55, 0.0, 1.0])
    assert default_beta(0).size == 0

    sim = simulate_dataset(ScenarioSpec(N=2000, p=6, seed=1))
    X = sim.data.X
    assert X.shape == (2000, 6) and sim.data.names == ["x1", "x2", "x3", "x4", "x5", "x6"]
    assert set(np.unique(X[:, :3])) <= {0.0, 1.0}
    assert len(np.unique(X[:, 3])) == 2000
    assert X[:, 0].mean() < X[:, 2].mean()
    print("[PASS] binary columns first, alternating-sign coefficients")


def test_transforms():
    print("\n[TEST] Testing Transforms")
    print("=" * 40)

    grid = np.linspace(-3.0, 3.0, 7)
    assert np.array_equal(AlphaTruth(Transform.IDENTITY)(grid), grid)
    assert np.allclose(AlphaTruth(Transform.EXP)(np.exp(grid)), grid)

    identity = simulate_dataset(ScenarioSpec(N=500, p=4, seed=2))
    assert np.array_equal(identity.data.y, identity.y_star)

    skewed = simulate_dataset(ScenarioSpec(N=500, p=4, transform="exp", seed=2))
    assert np.all(skewed.data.y > 0)
    assert np.allclose(skewed.alpha_truth(skewed.data.y), skewed.y_star)

    shifted = simulate_dataset(ScenarioSpec(N=500, p=4, transform="log-shift", seed=2))
    assert shifted.alpha_truth.y0_shift == np.ceil(-shifted.y_star.min()) + 1.0
    assert np.all(np.isfinite(shifted.data.y))
    assert np.allclose(shifted.alpha_truth(shifted.data.y), shifted.y_star)
    print("[PASS] identity, exp and log-shift round trips")


def test_determinism_and_validation():
    print("\n[TEST] Testing Determinism and Validation")
    print("=" * 40)

    spec = ScenarioSpec(N=300, p=5, residual="gumbel", seed=11)
    first, second = simulate_dataset(spec), simulate_dataset(spec)
    assert np.array_equal(first.data.y, second.data.y)
    assert np.array_equal(first.data.X, second.data.X)
    assert spec.link is LinkFamily.LOGLOG and Residual.LOGISTIC.link is LinkFamily.LOGIT
    other = simulate_dataset(ScenarioSpec(N=300, p=5, residual="gumbel", seed=12))
    assert not np.array_equal(first.data.y, other.data.y)

    bad_specs = [
        dict(N=1, p=2),
        dict(N=100, p=3, beta_truth=[1.0, 2.0]),
        dict(N=100, p=3, y0_shift=5.0),
        dict(N=100, p=3, transform="square"),
    ]
    for kwargs in bad_specs:
        try:
            ScenarioSpec(**kwargs)
            raise AssertionError(f"{kwargs} should be rejected")
        except ArgumentError:
            pass
    print("[PASS] fixed seed is bit-identical; bad scenarios rejected")


def test_monte_carlo_truth():
    print("\n[TEST] Testing Monte Carlo Truth")
    print("=" * 40)

    zero = ScenarioSpec(N=100, p=3, beta_truth=np.zeros(3), seed=4)
    mean, median = true_conditional(zero, [1.0, -2.0, 0.5], n_mc=100_000)
    assert abs(mean) < 0.03 and abs(median) < 0.03, (mean, median)

    skewed = ScenarioSpec(N=100, p=3, beta_truth=np.zeros(3), transform="exp", seed=4)
    _, median = true_conditional(skewed, [0.3, 0.3, 0.3], n_mc=100_000)
    assert abs(median - 1.0) < 0.03, median

    gumbel = ScenarioSpec(N=100, p=2, beta_truth=np.zeros(2), residual="gumbel", seed=4)
    mean, _ = true_conditional(gumbel, [0.0, 0.0], n_mc=100_000)
    assert abs(mean - EULER_GAMMA) < 0.02, mean

    for bad in (dict(x0=[0.0, 0.0, 0.0], n_mc=500), dict(x0=[0.0], n_mc=10_000)):
        try:
            true_conditional(zero, bad["x0"], n_mc=bad["n_mc"])
            raise AssertionError(f"{bad} should be rejected")
        except ArgumentError:
            pass
    print("[PASS] symmetric, exp-median and Gumbel-mean truths")


if __name__ == "__main__":
    success = run_suite("bigcpm Simulation Test Suite", [
        test_default_beta_and_design,
        test_transforms,
        test_determinism_and_validation,
        test_monte_carlo_truth,
    ])
    sys.exit(0 if success else 1)
