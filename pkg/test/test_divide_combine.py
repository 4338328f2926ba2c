"""
Test divide-and-combine estimation
Partitioning, K-vector alignment, averaging and the monotonicity repair
"""
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np

from bigcpm.combine import build_kvectors, combine, enforce_monotonicity, fit_divide_combine, partition
from bigcpm.combine.engine import near_constant_columns
from bigcpm.core.data import Dataset, index_outcomes
from bigcpm.core.link import LinkFamily
from bigcpm.core.model import CpmFit, fit_cpm
from bigcpm.errors import (ArgumentError, ConsistencyError, InestimableCoefficientError,
                           UnconvergedSubsetError)
from suite import run_suite

# three subsets of a 15-observation example
SUBSET_VALUES = [
    [10.2, 13.1, 15.0, 16.4, 18.2],
    [11.0, 15.7, 16.9, 17.5, 21.3],
    [9.5, 12.4, 13.8, 16.1, 19.6],
]


def make_fit(alpha, beta, alpha_var=None, beta_cov=None, converged=True):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return CpmFit(
        alpha=alpha, beta=beta,
        alpha_var=np.full(alpha.size, 0.1) if alpha_var is None else np.asarray(alpha_var, dtype=float),
        beta_cov=np.eye(beta.size) * 0.2 if beta_cov is None else np.asarray(beta_cov, dtype=float),
        loglik=-1.0, iterations=3, converged=converged,
        distinct=np.arange(alpha.size + 1, dtype=float), link=LinkFamily.LOGIT,
    )


def test_partition():
    print("\n[TEST] Testing Partition")
    print("=" * 40)

    y = np.arange(15, dtype=float)
    plan = partition(y, 3, np.random.default_rng(0))
    assert sorted(plan.subset_sizes) == [5, 5, 5]
    assert sorted(plan.assignment[:3]) == [1, 2, 3]
    assert sorted(plan.assignment[-3:]) == [1, 2, 3]
    assert list(np.bincount(plan.assignment)[1:]) == list(plan.subset_sizes)

    plan = partition(np.arange(10, dtype=float), 3, np.random.default_rng(1))
    assert sorted(plan.subset_sizes) == [3, 3, 4]

    rng_y = np.random.default_rng(9).normal(size=101)
    first = partition(rng_y, 7, np.random.default_rng(42))
    second = partition(rng_y, 7, np.random.default_rng(42))
    assert np.array_equal(first.assignment, second.assignment)
    assert sum(len(rows) for rows in first.subsets()) == 101

    for bad_k in (1, 6):
        try:
            partition(np.arange(10, dtype=float), bad_k)
            raise AssertionError(f"K={bad_k} should be rejected")
        except ArgumentError:
            pass
    print("[PASS] sizes, extreme spreading, determinism and K range")


def test_kvectors_small_example():
    print("\n[TEST] Testing K-Vectors")
    print("=" * 40)

    all_values = np.concatenate(SUBSET_VALUES)
    global_index = index_outcomes(all_values)
    assert global_index.M == 15
    subsets = [index_outcomes(values) for values in SUBSET_VALUES]
    table = build_kvectors(global_index, subsets, [4, 4, 4])

    assert tuple(table.for_outcome(13.8)) == (2, 1, 3)
    assert tuple(table.for_outcome(18.5)) == (0, 4, 4)
    assert table.rows.shape == (14, 3)
    assert np.all(table.contributors() >= 1)
    print("  (2,1,3) at 13.8 and (0,4,4) at 18.5: [PASS]")

    single = build_kvectors(global_index, [global_index], [14 + 2])
    assert list(single.rows[:, 0]) == list(range(1, 17))
    print("  single subset is the identity alignment: [PASS]")

    try:
        build_kvectors(global_index, [index_outcomes([9.5, 12.0, 21.3])], [2])
        raise AssertionError("off-grid subset value should be rejected")
    except ConsistencyError:
        pass
    print("[PASS] K-vector alignment")


def test_combine_arithmetic():
    print("\n[TEST] Testing Combination Arithmetic")
    print("=" * 40)

    global_index = index_outcomes([1.0, 2.0, 3.0, 4.0])
    table = build_kvectors(global_index,
                           [index_outcomes([1.0, 2.0, 4.0]), index_outcomes([1.0, 3.0, 4.0])], [3, 3])
    assert table.rows.tolist() == [[1, 1], [2, 1], [2, 2], [3, 3]]

    fit1 = make_fit([-1.0, 1.0], [0.4], alpha_var=[0.1, 0.3], beta_cov=[[0.2]])
    fit2 = make_fit([-0.5, 2.0], [0.6], alpha_var=[0.5, 0.7], beta_cov=[[0.6]])
    combined = combine([fit1, fit2], table, 2, 4)
    assert np.allclose(combined.alpha, [-0.75, 0.25, 1.5])
    assert np.allclose(combined.beta, [0.5])
    assert np.allclose(combined.alpha_var, [0.6 / 4, 0.8 / 4, 1.0 / 4])
    assert np.allclose(combined.beta_cov, [[0.2]])
    print("  K=2 row (2,1) averages c1_2 and c2_1: [PASS]")

    whole = fit_cpm(Dataset([1.0, 3.0, 2.0, 5.0, 4.0, 6.0], [[0.0], [1.0], [0.0], [1.0], [1.0], [0.0]]))
    index = index_outcomes(whole.distinct)
    one = combine([whole], build_kvectors(index, [index], [whole.params().size]), 1, whole.M)
    assert np.array_equal(one.alpha, whole.alpha) and np.array_equal(one.beta, whole.beta)
    assert np.array_equal(one.alpha_var, whole.alpha_var)
    assert np.array_equal(one.beta_cov, whole.beta_cov)
    print("  K=1 reproduces the single fit: [PASS]")

    try:
        combine([fit1, make_fit([-0.5, 2.0], [0.6], converged=False)], table, 2, 4)
        raise AssertionError("unconverged subset should be rejected")
    except UnconvergedSubsetError as e:
        assert e.subset == 2
    print("[PASS] combination arithmetic")


def test_variance_identity():
    """Combined beta covariance is (1/K^2) times the sum of subset covariances"""
    print("\n[TEST] Testing Variance Combination")
    print("=" * 40)

    rng = np.random.default_rng(3)
    K, p = 5, 4
    global_index = index_outcomes(np.arange(6, dtype=float))
    fits, covs = [], []
    for _ in range(K):
        A = rng.standard_normal((p, p))
        cov = A @ A.T + p * np.eye(p)
        covs.append(cov)
        fits.append(make_fit(np.sort(rng.normal(size=5)), rng.normal(size=p), beta_cov=cov))
    table = build_kvectors(global_index, [global_index] * K, [5 + p] * K)
    combined = combine(fits, table, K, 6)
    assert np.max(np.abs(combined.beta_cov - sum(covs) / K ** 2)) < 1e-12
    print("[PASS] beta covariance identity holds to 1e-12")


def test_monotonicity_repair():
    print("\n[TEST] Testing Monotonicity Repair")
    print("=" * 40)

    tail = enforce_monotonicity([1.0, 2.0, 3.0, 5.0, 4.8, 4.9], 3, 7)
    assert list(tail[-3:]) == [5.0, 5.0, 5.0]
    head = enforce_monotonicity([2.0, 1.5, 1.0, 3.0, 4.0, 5.0], 3, 7)
    assert list(head) == [1.0, 1.0, 1.0, 3.0, 4.0, 5.0]
    already = np.array([0.0, 1.0, 2.0, 3.0])
    assert np.array_equal(enforce_monotonicity(already, 2, 5), already)

    rng = np.random.default_rng(17)
    for _ in range(1000):
        K = int(rng.integers(2, 6))
        M = int(rng.integers(2 * K + 1, 41))
        alpha = np.sort(rng.normal(size=M - 1))
        perturbed = alpha.copy()
        perturbed[:K - 1] += rng.normal(0.0, 1.0, K - 1)
        perturbed[M - K:] += rng.normal(0.0, 1.0, K - 1)
        repaired = enforce_monotonicity(perturbed, K, M)
        assert np.all(np.diff(repaired) >= 0)
        assert np.array_equal(repaired[K - 1:M - K], perturbed[K - 1:M - K])

    try:
        enforce_monotonicity([0.0, 1.0], 2, 5)
        raise AssertionError("length mismatch should be rejected")
    except ArgumentError:
        pass
    print("[PASS] 1000 random repairs are monotone with the interior untouched")


def test_divide_combine_fit():
    print("\n[TEST] Testing Divide-and-Combine Fit")
    print("=" * 40)

    rng = np.random.default_rng(21)
    X = rng.standard_normal((3000, 3))
    y = X @ np.array([0.8, -0.4, 0.2]) + rng.logistic(size=3000)
    data = Dataset(y, X)

    whole = fit_cpm(data)
    combined = fit_divide_combine(data, 4, "logit", rng=np.random.default_rng(5), workers=1)
    assert combined.converged and combined.K == 4
    assert combined.M == 3000 and combined.alpha.size == 2999
    assert np.all(np.diff(combined.alpha) >= 0)
    assert len(combined.subset_fits) == 4
    assert all(item.n_obs == 750 and item.converged for item in combined.subset_fits)
    assert np.max(np.abs(combined.beta - whole.beta)) < 0.1
    ratio = np.mean(combined.beta_se / whole.beta_se)
    assert 0.98 < ratio < 1.5, ratio
    print(f"  mean SE ratio {ratio:.3f}: [PASS]")

    pooled = fit_divide_combine(data, 4, "logit", rng=np.random.default_rng(5), workers=2)
    assert np.allclose(pooled.beta, combined.beta, rtol=0, atol=1e-10)
    assert np.allclose(pooled.alpha, combined.alpha, rtol=0, atol=1e-10)
    print("  worker pool matches the serial fit: [PASS]")
    print("[PASS] divide-and-combine fit")


def test_constant_predictor_in_subset():
    print("\n[TEST] Testing Inestimable Coefficients")
    print("=" * 40)

    rng = np.random.default_rng(8)
    X = np.column_stack([np.zeros(40), rng.standard_normal(40)])
    X[7, 0] = 1.0
    data = Dataset(rng.normal(size=40), X, ["rare", "x2"])
    assert near_constant_columns(data, 2) == ["rare"]
    try:
        fit_divide_combine(data, 2, rng=np.random.default_rng(0))
        raise AssertionError("constant column inside a subset should be rejected")
    except InestimableCoefficientError as e:
        assert e.column == "rare" and e.subset in (1, 2)
    print("[PASS] constant predictor inside a subset is named")


if __name__ == "__main__":
    success = run_suite("bigcpm Divide-and-Combine Test Suite", [
        test_partition,
        test_kvectors_small_example,
        test_combine_arithmetic,
        test_variance_identity,
        test_monotonicity_repair,
        test_divide_combine_fit,
        test_constant_predictor_in_subset,
    ])
    sys.exit(0 if success else 1)
