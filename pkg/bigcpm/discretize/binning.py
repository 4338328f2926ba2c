"""
Equal-quantile binning of the outcome
"""
from dataclasses import dataclass

import numpy as np

from ..config import as_generator
from ..errors import ArgumentError


@dataclass(frozen=True)
class BinningResult:
    """Binned outcome and the bin layout by rank

    bin_edges[b]:bin_edges[b+1] are the sorted positions of bin b.
    """
    y_b: np.ndarray
    bin_edges: np.ndarray
    M_b: int
    achieved: int
    bin_sizes: np.ndarray


def bin_equal_quantile(y, M_b: int, rng=None) -> BinningResult:
    """Group sorted outcomes into M_b bins of size q or q+1 labelled by their medians"""
    values = np.asarray(y, dtype=float).reshape(-1)
    n_obs = values.size
    if not isinstance(M_b, (int, np.integer)) or M_b < 2 or M_b > n_obs:
        raise ArgumentError(f"Bin count M_b={M_b} must satisfy 2 <= M_b <= N (N={n_obs})")
    rng = as_generator(rng)

    q, r = divmod(n_obs, M_b)
    sizes = rng.permutation(np.array([q] * (M_b - r) + [q + 1] * r, dtype=np.int64))
    edges = np.concatenate([[0], np.cumsum(sizes)])

    order = np.argsort(values, kind="stable")
    ordered = values[order]
    # midpoint of the central order statistics; equal for odd sizes
    lower = ordered[edges[:-1] + (sizes - 1) // 2]
    upper = ordered[edges[:-1] + sizes // 2]
    medians = np.where(sizes % 2 == 1, lower, 0.5 * (lower + upper))

    y_b = np.empty(n_obs)
    y_b[order] = np.repeat(medians, sizes)
    return BinningResult(y_b=y_b, bin_edges=edges, M_b=int(M_b),
                         achieved=int(np.unique(y_b).size), bin_sizes=sizes)
