"""
Cumulative probability model fitting
Newton's method with step-halving on (alpha, beta); each step solves
the structured system through the banded alpha factorization.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from ..errors import ArgumentError, SeparationError, SingularHessianError
from .data import Dataset, OutcomeIndex, empirical_cdf_cuts, index_outcomes
from .likelihood import StructuredHessian, derivatives_unchecked, neg_loglik_unchecked
from .link import LinkFamily
from .solver import dense_newton_step, factorize, solve_factored, variance_from_factors

logger = logging.getLogger(__name__)

SOLVERS = ("banded", "dense")
# largest Newton step, relative to max(1, max|theta|), still accepted as converged
DRIFT_RATIO = 1e-3


@dataclass
class FitOptions:
    """Convergence and solver settings for fit_cpm"""
    score_tol: float = 1e-8
    ll_tol: float = 1e-10
    max_iter: int = 100
    bound: float = 500.0
    max_halvings: int = 30
    solver: str = "banded"
    compute_variance: bool = True

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ArgumentError(f"Unknown solver '{self.solver}'; choose one of: {', '.join(SOLVERS)}")
        if self.max_iter < 0 or self.max_halvings < 0:
            raise ArgumentError("max_iter and max_halvings must be non-negative")


@dataclass
class CpmFit:
    """Fitted cumulative probability model"""
    alpha: np.ndarray
    beta: np.ndarray
    alpha_var: np.ndarray
    beta_cov: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    distinct: np.ndarray
    link: LinkFamily
    names: List[str] = field(default_factory=list)
    max_score: float = float("nan")
    n_obs: int = 0
    history: List[float] = field(default_factory=list)
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

    def params(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.beta])


def alpha_at(fit, y) -> np.ndarray:
    """Evaluate the fitted step function alpha(y)

    alpha(y) = alpha_j on [y_(j), y_(j+1)); -inf below the grid and +inf
    at or above its largest value.
    """
    y = np.asarray(y, dtype=float)
    position = np.searchsorted(fit.distinct, y, side="right")
    padded = np.concatenate([[-np.inf], fit.alpha, [np.inf]])
    return padded[position]


def _newton_direction(score: np.ndarray, hessian: StructuredHessian, solver: str) -> np.ndarray:
    if solver == "dense":
        return dense_newton_step(score, hessian)
    return solve_factored(factorize(hessian.negated()), score)


def _variance(hessian: StructuredHessian, solver: str):
    if solver == "dense":
        try:
            inverse = np.linalg.inv(-hessian.to_dense())
        except np.linalg.LinAlgError as exc:
            raise SingularHessianError(f"Hessian is singular: {exc}", "full") from None
        m = hessian.n_alpha
        beta_cov = inverse[m:, m:]
        return np.diag(inverse)[:m].copy(), 0.5 * (beta_cov + beta_cov.T)
    return variance_from_factors(factorize(hessian.negated()))


def fit_cpm(data: Dataset, link: Union[str, LinkFamily] = LinkFamily.LOGIT,
            opts: Optional[FitOptions] = None, index: Optional[OutcomeIndex] = None) -> CpmFit:
    """Fit the CPM by nonparametric maximum likelihood"""
    link = LinkFamily.from_name(link)
    opts = opts or FitOptions()
    index = index or index_outcomes(data.y)
    X, rank = data.X, index.rank
    n_alpha = index.M - 1
    started = time.perf_counter()

    # exact no-covariate MLE
    theta = np.concatenate([link.ppf(empirical_cdf_cuts(index, data.N)), np.zeros(data.p)])
    nll = neg_loglik_unchecked(theta[:n_alpha], theta[n_alpha:], X, rank, link)
    history = [nll]
    converged = False
    rel_change = None
    full_step = False
    iterations = 0

    while True:
        score, hessian, _ = derivatives_unchecked(theta[:n_alpha], theta[n_alpha:], X, rank, link)
        max_score = float(np.max(np.abs(score)))
        step = _newton_direction(score, hessian, opts.solver)
        # vanishing score with a large step: the likelihood still rises towards infinity
        step_size = float(np.max(np.abs(step), initial=0.0))
        drifting = step_size > DRIFT_RATIO * max(1.0, float(np.max(np.abs(theta), initial=0.0)))
        if max_score < opts.score_tol or (rel_change is not None and full_step and rel_change < opts.ll_tol):
            if drifting:
                largest = int(np.argmax(np.abs(step)))
                raise SeparationError(
                    f"Parameter {largest} keeps moving ({theta[largest]:.4g}, next step {step[largest]:.3g}) "
                    "while the score vanishes; the data appear to be separated", parameter=largest)
            converged = True
            break
        if iterations >= opts.max_iter:
            logger.warning("CPM fit stopped after %d iterations (max |score| = %.3g)", iterations, max_score)
            break

        scale = 1.0
        slack = 1e-12 * max(1.0, abs(nll))
        for halving in range(opts.max_halvings + 1):
            trial = theta + scale * step
            trial_nll = neg_loglik_unchecked(trial[:n_alpha], trial[n_alpha:], X, rank, link)
            if np.isfinite(trial_nll) and trial_nll <= nll + slack:
                break
            scale *= 0.5
        else:
            logger.warning("Step-halving exhausted at iteration %d (max |score| = %.3g)", iterations, max_score)
            break

        full_step = halving == 0
        rel_change = abs(nll - trial_nll) / max(abs(nll), np.finfo(float).tiny)
        theta, nll = trial, trial_nll
        history.append(nll)
        iterations += 1
        logger.debug("iter %d: neg_loglik=%.10g max|score|=%.3g halvings=%d",
                     iterations, nll, max_score, halving)

        largest = int(np.argmax(np.abs(theta)))
        if abs(theta[largest]) > opts.bound:
            raise SeparationError(
                f"Parameter {largest} reached {theta[largest]:.4g} (bound {opts.bound}); "
                "the data appear to be separated", parameter=largest)

    alpha, beta = theta[:n_alpha].copy(), theta[n_alpha:].copy()
    alpha_var = np.full(n_alpha, np.nan)
    beta_cov = np.full((data.p, data.p), np.nan)
    if opts.compute_variance:
        try:
            alpha_var, beta_cov = _variance(hessian, opts.solver)
        except SingularHessianError:
            if converged:
                raise
            logger.warning("Variance unavailable for an unconverged fit")

    return CpmFit(
        alpha=alpha, beta=beta, alpha_var=alpha_var, beta_cov=beta_cov,
        loglik=-nll, iterations=iterations, converged=converged,
        distinct=index.distinct.copy(), link=link, names=list(data.names),
        max_score=max_score, n_obs=data.N, history=history,
        elapsed_s=time.perf_counter() - started,
    )
