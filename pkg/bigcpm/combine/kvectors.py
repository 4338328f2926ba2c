"""
K-vector alignment of subset parameters onto the global outcome grid
"""
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..core.data import OutcomeIndex
from ..errors import ConsistencyError


@dataclass(frozen=True)
class KVectorTable:
    """One row per combined parameter (alpha_1..alpha_{M-1}, beta_1..beta_p)

    Entry [row, k] is the 1-based position of the matching parameter in
    subset k's (alpha, beta) vector, or 0 when subset k does not contribute.
    """
    rows: np.ndarray
    n_alpha: int
    p: int
    distinct: np.ndarray

    @property
    def K(self) -> int:
        return self.rows.shape[1]

    @property
    def alpha_rows(self) -> np.ndarray:
        return self.rows[:self.n_alpha]

    @property
    def beta_rows(self) -> np.ndarray:
        return self.rows[self.n_alpha:]

    def contributors(self) -> np.ndarray:
        """Number of nonzero entries per row"""
        return np.count_nonzero(self.rows, axis=1)

    def for_outcome(self, y: float) -> np.ndarray:
        """K-vector of the alpha whose interval [y_(j), y_(j+1)) contains y"""
        j = int(np.searchsorted(self.distinct, y, side="right"))
        if j < 1 or j > self.n_alpha:
            raise ConsistencyError(f"Outcome {y} lies outside the interior of the global grid")
        return self.rows[j - 1]


def build_kvectors(global_index: OutcomeIndex, subset_indices: Sequence[OutcomeIndex],
                   subset_param_counts: Sequence[int]) -> KVectorTable:
    """Align each subset's parameters with the global parameter list"""
    if len(subset_indices) != len(subset_param_counts):
        raise ConsistencyError("One parameter count is needed per subset")
    grid = global_index.distinct
    n_alpha = global_index.M - 1
    cuts = grid[:-1]

    alpha_columns: List[np.ndarray] = []
    beta_columns: List[np.ndarray] = []
    p = None
    for k, (sub, count) in enumerate(zip(subset_indices, subset_param_counts), start=1):
        missing = ~np.isin(sub.distinct, grid)
        if np.any(missing):
            raise ConsistencyError(
                f"Subset {k} has {int(missing.sum())} outcome value(s) not in the global grid "
                f"(first: {sub.distinct[missing][0]!r})")
        m_k = sub.M
        sub_p = int(count) - (m_k - 1)
        if sub_p < 0 or (p is not None and sub_p != p):
            raise ConsistencyError(f"Subset {k} reports {count} parameters for {m_k} distinct outcomes")
        p = sub_p

        # subset alpha i covers the cut when i subset values lie at or below it
        position = np.searchsorted(sub.distinct, cuts, side="right")
        valid = (position >= 1) & (position <= m_k - 1)
        alpha_columns.append(np.where(valid, position, 0))
        beta_columns.append(m_k - 1 + np.arange(1, p + 1))

    rows = np.vstack([np.column_stack(alpha_columns), np.column_stack(beta_columns)]).astype(np.int64)
    uncovered = np.flatnonzero(np.count_nonzero(rows[:n_alpha], axis=1) == 0)
    if uncovered.size:
        raise ConsistencyError(f"No subset covers alpha cut(s) starting at {int(uncovered[0]) + 1}")
    return KVectorTable(rows=rows, n_alpha=n_alpha, p=p, distinct=grid.copy())
