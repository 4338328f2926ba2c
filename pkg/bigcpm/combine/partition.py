"""
Random partitioning with extreme-value spreading
The K smallest and the K largest outcomes each go to K distinct subsets;
the remaining observations fill the subsets at random.
"""
from dataclasses import dataclass
from typing import List

import numpy as np

from ..config import as_generator
from ..core.data import Dataset
from ..errors import ArgumentError


@dataclass(frozen=True)
class PartitionPlan:
    """Subset label (1..K) per observation"""
    K: int
    assignment: np.ndarray
    subset_sizes: np.ndarray

    def rows(self, subset: int) -> np.ndarray:
        """Row indices of a 1-based subset, in original order"""
        return np.flatnonzero(self.assignment == subset)

    def subsets(self) -> List[np.ndarray]:
        return [self.rows(k) for k in range(1, self.K + 1)]


def partition(data, K: int, rng=None) -> PartitionPlan:
    """Split observations into K subsets whose sizes differ by at most one"""
    y = data.y if isinstance(data, Dataset) else np.asarray(data, dtype=float).reshape(-1)
    n_obs = y.size
    if not isinstance(K, (int, np.integer)) or K < 2 or 2 * K > n_obs:
        raise ArgumentError(f"Subset count K={K} must satisfy 2 <= K <= N/2 (N={n_obs})")
    rng = as_generator(rng)

    q, r = divmod(n_obs, K)
    sizes = rng.permutation(np.array([q + 1] * r + [q] * (K - r), dtype=np.int64))

    order = np.argsort(y, kind="stable")
    assignment = np.zeros(n_obs, dtype=np.int64)
    assignment[order[:K]] = rng.permutation(K) + 1
    assignment[order[n_obs - K:]] = rng.permutation(K) + 1

    # every subset has at least 2 slots since q >= 2
    remaining = np.repeat(np.arange(1, K + 1), sizes - 2)
    assignment[order[K:n_obs - K]] = rng.permutation(remaining)
    return PartitionPlan(K=int(K), assignment=assignment, subset_sizes=sizes)
