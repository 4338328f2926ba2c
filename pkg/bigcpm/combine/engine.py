"""
Divide-and-combine CPM estimation
Fits one CPM per subset, aligns the subset estimates with K-vectors,
averages them and repairs alpha monotonicity at the two ends.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import as_generator, default_workers
from ..core.data import Dataset, index_outcomes
from ..core.link import LinkFamily
from ..core.model import CpmFit, FitOptions, fit_cpm
from ..errors import ArgumentError, ConsistencyError, InestimableCoefficientError, UnconvergedSubsetError
from .kvectors import KVectorTable, build_kvectors
from .partition import PartitionPlan, partition

logger = logging.getLogger(__name__)


@dataclass
class SubsetDiagnostics:
    """Convergence summary of one subset fit"""
    subset: int
    n_obs: int
    M: int
    converged: bool
    iterations: int
    loglik: float
    max_score: float
    elapsed_s: float


@dataclass
class CombinedFit:
    """Averaged estimates on the global outcome grid

    Only alpha variances and the p x p beta covariance are kept.
    """
    alpha: np.ndarray
    beta: np.ndarray
    alpha_var: np.ndarray
    beta_cov: np.ndarray
    kvectors: KVectorTable
    distinct: np.ndarray
    link: LinkFamily
    K: int
    names: List[str] = field(default_factory=list)
    subset_fits: List[SubsetDiagnostics] = field(default_factory=list)
    plan: Optional[PartitionPlan] = None
    converged: bool = True
    elapsed_s: float = 0.0

    @property
    def M(self) -> int:
        return self.distinct.size

    @property
    def p(self) -> int:
        return self.beta.size

    @property
    def alpha_se(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.alpha_var, 0.0))

    @property
    def beta_se(self) -> np.ndarray:
        return np.sqrt(np.maximum(np.diag(self.beta_cov), 0.0))


def enforce_monotonicity(alpha, K: int, M: int) -> np.ndarray:
    """Make the combined alpha non-decreasing by repairing the K-1 end values"""
    out = np.array(alpha, dtype=float, copy=True).reshape(-1)
    if out.size != M - 1:
        raise ArgumentError(f"alpha has length {out.size}; expected M-1 = {M - 1}")
    for i in range(min(K - 2, M - 3), -1, -1):
        out[i] = min(out[i], out[i + 1])
    for i in range(max(M - K, 1), M - 1):
        out[i] = max(out[i], out[i - 1])
    return out


def combine(fits: Sequence[CpmFit], table: KVectorTable, K: int, M: int) -> CombinedFit:
    """Average subset estimates row by row and aggregate their variances"""
    if len(fits) != K or table.K != K:
        raise ConsistencyError(f"Got {len(fits)} fits and a {table.K}-column table for K={K}")
    if table.n_alpha != M - 1:
        raise ConsistencyError(f"K-vector table has {table.n_alpha} alpha rows; expected {M - 1}")
    link = fits[0].link
    for k, fit in enumerate(fits, start=1):
        if not fit.converged:
            raise UnconvergedSubsetError(k)
        if fit.link is not link:
            raise ConsistencyError(f"Subset {k} was fit with link {fit.link.value}, not {link.value}")
        if fit.p != table.p:
            raise ConsistencyError(f"Subset {k} has {fit.p} coefficients; table expects {table.p}")
        bad = np.flatnonzero(~np.isfinite(fit.beta) | ~np.isfinite(np.diag(fit.beta_cov)))
        if bad.size:
            names = fit.names or [f"x{j + 1}" for j in range(fit.p)]
            raise InestimableCoefficientError(names[bad[0]], k)

    n_rows = table.rows.shape[0]
    values = np.zeros((n_rows, K))
    variances = np.zeros((n_rows, K))
    for k, fit in enumerate(fits):
        present = table.rows[:, k] > 0
        position = table.rows[present, k] - 1
        values[present, k] = fit.params()[position]
        variances[present, k] = np.concatenate([fit.alpha_var, np.diag(fit.beta_cov)])[position]

    counts = table.contributors()
    estimate = values.sum(axis=1) / counts
    n_alpha = table.n_alpha
    alpha_var = variances[:n_alpha].sum(axis=1) / counts[:n_alpha] ** 2

    # beta rows are all nonzero, so the covariance weights are 1/K^2
    beta_cov = sum(fit.beta_cov for fit in fits) / K ** 2
    alpha = enforce_monotonicity(estimate[:n_alpha], K, M)

    return CombinedFit(
        alpha=alpha, beta=estimate[n_alpha:], alpha_var=alpha_var, beta_cov=beta_cov,
        kvectors=table, distinct=table.distinct, link=link, K=K,
        names=list(fits[0].names),
    )


def near_constant_columns(data: Dataset, K: int) -> List[str]:
    """Predictor columns whose minority count is below K"""
    flagged = []
    for j, name in enumerate(data.names):
        _, counts = np.unique(data.X[:, j], return_counts=True)
        if data.N - counts.max() < K:
            flagged.append(name)
    return flagged


def _fit_subset(task: Tuple[Dataset, LinkFamily, FitOptions]) -> CpmFit:
    subset, link, opts = task
    return fit_cpm(subset, link, opts)


def fit_divide_combine(data: Dataset, K: int, link: Union[str, LinkFamily] = LinkFamily.LOGIT,
                       opts: Optional[FitOptions] = None, rng=None,
                       workers: Optional[int] = None) -> CombinedFit:
    """Partition, fit each subset and combine"""
    link = LinkFamily.from_name(link)
    opts = opts or FitOptions()
    workers = workers or default_workers()
    started = time.perf_counter()

    global_index = index_outcomes(data.y)
    flagged = near_constant_columns(data, K)
    if flagged:
        logger.warning("Near-constant predictor(s) may be constant within a subset: %s", ", ".join(flagged))

    plan = partition(data, K, as_generator(rng))
    subsets = [data.subset(rows) for rows in plan.subsets()]
    for k, subset in enumerate(subsets, start=1):
        constant = np.flatnonzero(np.ptp(subset.X, axis=0) == 0.0) if subset.p else []
        if len(constant):
            raise InestimableCoefficientError(subset.names[constant[0]], k)

    tasks = [(subset, link, opts) for subset in subsets]
    if workers > 1:
        logger.info("Fitting %d subsets with %d workers", K, workers)
        with ProcessPoolExecutor(max_workers=min(workers, K)) as executor:
            fits = list(executor.map(_fit_subset, tasks))
    else:
        fits = [_fit_subset(task) for task in tasks]

    diagnostics = [
        SubsetDiagnostics(subset=k, n_obs=subset.N, M=fit.M, converged=fit.converged,
                          iterations=fit.iterations, loglik=fit.loglik,
                          max_score=fit.max_score, elapsed_s=fit.elapsed_s)
        for k, (subset, fit) in enumerate(zip(subsets, fits), start=1)
    ]
    for item in diagnostics:
        logger.debug("subset %d: n=%d M=%d converged=%s iterations=%d",
                     item.subset, item.n_obs, item.M, item.converged, item.iterations)

    table = build_kvectors(global_index, [index_outcomes(s.y) for s in subsets],
                           [fit.params().size for fit in fits])
    combined = combine(fits, table, K, global_index.M)
    combined.subset_fits = diagnostics
    combined.plan = plan
    combined.elapsed_s = time.perf_counter() - started
    return combined
