"""
Datasets and ordinal indexing of continuous outcomes
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..errors import DegenerateOutcomeError, InvalidDatasetError


@dataclass(frozen=True)
class Dataset:
    """Outcome vector y (length N) and dense predictor matrix X (N x p)"""
    y: np.ndarray
    X: np.ndarray
    names: List[str] = field(default_factory=list)

    def __post_init__(self):
        y = np.ascontiguousarray(self.y, dtype=float).reshape(-1)
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if X.size else np.empty((y.size, 0))
        if X.ndim != 2 or X.shape[0] != y.size:
            raise InvalidDatasetError(f"X has shape {X.shape}; expected ({y.size}, p)")
        if y.size < 2:
            raise InvalidDatasetError(f"Need at least 2 observations, got {y.size}")
        if not np.all(np.isfinite(y)):
            raise InvalidDatasetError("Outcome contains non-finite values")
        if not np.all(np.isfinite(X)):
            raise InvalidDatasetError("Predictors contain non-finite values")
        names = list(self.names) if self.names else [f"x{j + 1}" for j in range(X.shape[1])]
        if len(names) != X.shape[1]:
            raise InvalidDatasetError(f"Got {len(names)} predictor names for {X.shape[1]} columns")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", np.ascontiguousarray(X))
        object.__setattr__(self, "names", names)

    @property
    def N(self) -> int:
        return self.y.size

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def subset(self, rows: np.ndarray) -> "Dataset":
        return Dataset(self.y[rows], self.X[rows], self.names)

    def with_outcome(self, y: np.ndarray) -> "Dataset":
        return Dataset(y, self.X, self.names)


@dataclass(frozen=True)
class OutcomeIndex:
    """Sorted distinct outcomes and 1-based category rank per observation"""
    distinct: np.ndarray
    rank: np.ndarray

    @property
    def M(self) -> int:
        return self.distinct.size

    def counts(self) -> np.ndarray:
        """Observations per category"""
        return np.bincount(self.rank - 1, minlength=self.M)


def index_outcomes(y: Sequence[float]) -> OutcomeIndex:
    """Map outcomes to ordinal categories; exact equality defines a tie"""
    values = np.asarray(y, dtype=float).reshape(-1)
    if values.size < 2:
        raise InvalidDatasetError(f"Need at least 2 outcomes, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise InvalidDatasetError("Outcome contains non-finite values")
    distinct, inverse = np.unique(values, return_inverse=True)
    if distinct.size < 2:
        raise DegenerateOutcomeError(f"Outcome has a single distinct value ({distinct[0]!r})")
    return OutcomeIndex(distinct=distinct, rank=inverse.reshape(-1).astype(np.int64) + 1)


def empirical_cdf_cuts(index: OutcomeIndex, n_obs: Optional[int] = None) -> np.ndarray:
    """Empirical CDF at the M-1 interior cuts"""
    n_obs = n_obs or index.rank.size
    return np.cumsum(index.counts())[:-1] / n_obs
