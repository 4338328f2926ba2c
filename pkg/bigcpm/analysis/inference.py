"""
Conditional distribution inference from fitted CPMs
Works with whole-data, combined, binned and rounded fits alike.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..errors import ArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConditionalDistribution:
    """Estimated P(Y <= y_(j) | x0) and P(Y = y_(j) | x0) on the outcome grid"""
    grid: np.ndarray
    cdf: np.ndarray
    pmf: np.ndarray

    @property
    def M(self) -> int:
        return self.grid.size


def _covariates(fit, x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != fit.beta.size:
        raise ArgumentError(f"Covariate vector has length {x0.size}; the fit has p = {fit.beta.size}")
    if not np.all(np.isfinite(x0)):
        raise ArgumentError("Covariate vector contains non-finite values")
    return x0


def conditional_distribution(fit, x0) -> ConditionalDistribution:
    """cdf_j = F(alpha_j - beta'x0) for j < M and cdf_M = 1"""
    x0 = _covariates(fit, x0)
    if not getattr(fit, "converged", True):
        logger.warning("Conditional distribution taken from an unconverged fit")
    linear = float(fit.beta @ x0) if x0.size else 0.0
    cdf = np.append(fit.link.cdf(np.asarray(fit.alpha) - linear), 1.0)
    cdf = np.maximum.accumulate(np.clip(cdf, 0.0, 1.0))
    pmf = np.diff(cdf, prepend=0.0)
    return ConditionalDistribution(grid=np.asarray(fit.distinct, dtype=float), cdf=cdf, pmf=pmf)


def conditional_mean(dist: ConditionalDistribution) -> float:
    return float(np.dot(dist.pmf, dist.grid))


def conditional_median(dist: ConditionalDistribution) -> float:
    """Average of the grid values straddling 0.5

    An exact cdf of 0.5 returns that grid value; cdf_1 > 0.5 returns the
    lowest value and a crossing only at the last value returns the highest.
    """
    cdf, grid = dist.cdf, dist.grid
    exact = np.flatnonzero(cdf == 0.5)
    if exact.size:
        return float(grid[exact[0]])
    above = int(np.argmax(cdf > 0.5))
    if above == 0:
        return float(grid[0])
    if above == grid.size - 1:
        return float(grid[-1])
    return float(0.5 * (grid[above - 1] + grid[above]))


def predict(fit, X0, names: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Conditional mean and median for each covariate row"""
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    rows = []
    for i, x0 in enumerate(X0):
        dist = conditional_distribution(fit, x0)
        rows.append({
            "row": i + 1,
            "mean": conditional_mean(dist),
            "median": conditional_median(dist),
            "p_lowest": float(dist.pmf[0]),
            "p_highest": float(dist.pmf[-1]),
        })
    table = pd.DataFrame(rows, columns=["row", "mean", "median", "p_lowest", "p_highest"])
    if names is not None and X0.shape[1]:
        covariates = pd.DataFrame(X0, columns=list(names))
        table = pd.concat([table[["row"]], covariates, table.drop(columns=["row"])], axis=1)
    return table


def conditional_cdf_table(fit, X0) -> pd.DataFrame:
    """Long-format grid/cdf/pmf for each covariate row"""
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    frames = []
    for i, x0 in enumerate(X0):
        dist = conditional_distribution(fit, x0)
        frames.append(pd.DataFrame({"row": i + 1, "y": dist.grid, "cdf": dist.cdf, "pmf": dist.pmf}))
    return pd.concat(frames, ignore_index=True)
