"""
Nonparametric likelihood of the cumulative probability model
Outcomes are treated as ordered categories; each observation's
probability involves at most two adjacent alpha parameters.
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import sparse

from ..errors import PreconditionError
from .data import Dataset, OutcomeIndex
from .link import LinkFamily


@dataclass
class StructuredHessian:
    """Second derivative of the log-likelihood in block form

    The alpha block is tridiagonal (alpha_diag, alpha_offdiag); cross is
    the (M-1) x p alpha/beta block and beta_block the p x p block.
    """
    alpha_diag: np.ndarray
    alpha_offdiag: np.ndarray
    cross: np.ndarray
    beta_block: np.ndarray

    @property
    def n_alpha(self) -> int:
        return self.alpha_diag.size

    @property
    def p(self) -> int:
        return self.beta_block.shape[0]

    def negated(self) -> "StructuredHessian":
        return StructuredHessian(-self.alpha_diag, -self.alpha_offdiag, -self.cross, -self.beta_block)

    def to_dense(self) -> np.ndarray:
        """Full (M-1+p) square matrix; meant for small problems and oracles"""
        m, p = self.n_alpha, self.p
        dense = np.zeros((m + p, m + p))
        dense[np.arange(m), np.arange(m)] = self.alpha_diag
        if m > 1:
            dense[np.arange(m - 1), np.arange(1, m)] = self.alpha_offdiag
            dense[np.arange(1, m), np.arange(m - 1)] = self.alpha_offdiag
        dense[:m, m:] = self.cross
        dense[m:, :m] = self.cross.T
        dense[m:, m:] = self.beta_block
        return dense


@dataclass
class _CategoryTerms:
    """Per-observation quantities shared by value and derivatives"""
    has_hi: np.ndarray
    has_lo: np.ndarray
    hi_idx: np.ndarray
    lo_idx: np.ndarray
    eta_hi: np.ndarray
    eta_lo: np.ndarray
    log_prob: np.ndarray


def _category_terms(alpha: np.ndarray, beta: np.ndarray, X: np.ndarray,
                    rank: np.ndarray, link: LinkFamily) -> _CategoryTerms:
    n_alpha = alpha.size
    linear = X @ beta if beta.size else np.zeros(rank.size)
    has_hi = rank <= n_alpha
    has_lo = rank >= 2
    hi_idx = np.minimum(rank - 1, n_alpha - 1)
    lo_idx = np.maximum(rank - 2, 0)
    eta_hi = alpha[hi_idx] - linear
    eta_lo = alpha[lo_idx] - linear

    log_prob = np.empty(rank.size)
    only_hi = has_hi & ~has_lo
    only_lo = has_lo & ~has_hi
    both = has_hi & has_lo
    log_prob[only_hi] = link.log_cdf(eta_hi[only_hi])
    log_prob[only_lo] = link.log_sf(eta_lo[only_lo])
    if np.any(both):
        lo, hi = eta_lo[both], eta_hi[both]
        upper_tail = lo > 0.0
        # differences of survival functions keep precision in the upper tail
        prob = np.where(upper_tail, link.sf(lo) - link.sf(hi), link.cdf(hi) - link.cdf(lo))
        with np.errstate(divide="ignore", invalid="ignore"):
            log_prob[both] = np.where(prob > 0.0, np.log(np.where(prob > 0.0, prob, 1.0)), -np.inf)
    return _CategoryTerms(has_hi, has_lo, hi_idx, lo_idx, eta_hi, eta_lo, log_prob)


def _validate(alpha, beta, data: Dataset, index: OutcomeIndex) -> Tuple[np.ndarray, np.ndarray]:
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if alpha.size != index.M - 1:
        raise PreconditionError(f"alpha has length {alpha.size}; expected M-1 = {index.M - 1}")
    if beta.size != data.p:
        raise PreconditionError(f"beta has length {beta.size}; expected p = {data.p}")
    if index.rank.size != data.N:
        raise PreconditionError("Outcome index does not match the dataset")
    if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
        raise PreconditionError("Parameters must be finite")
    if np.any(np.diff(alpha) <= 0.0):
        raise PreconditionError("alpha must be strictly increasing")
    return alpha, beta


def neg_loglik_unchecked(alpha: np.ndarray, beta: np.ndarray, X: np.ndarray,
                         rank: np.ndarray, link: LinkFamily) -> float:
    """Negative log-likelihood; +inf when any category probability is not positive"""
    terms = _category_terms(alpha, beta, X, rank, link)
    if not np.all(np.isfinite(terms.log_prob)):
        return np.inf
    return -float(np.sum(terms.log_prob))


def neg_loglik(alpha, beta, data: Dataset, index: OutcomeIndex,
               link: Union[str, LinkFamily]) -> float:
    """Negative log-likelihood of the CPM with alpha_0 = -inf and alpha_M = +inf"""
    alpha, beta = _validate(alpha, beta, data, index)
    return neg_loglik_unchecked(alpha, beta, data.X, index.rank, LinkFamily.from_name(link))


def derivatives_unchecked(alpha: np.ndarray, beta: np.ndarray, X: np.ndarray,
                          rank: np.ndarray, link: LinkFamily) -> Tuple[np.ndarray, StructuredHessian, float]:
    """Score, structured Hessian and log-likelihood at (alpha, beta)"""
    n_alpha = alpha.size
    n_obs, p = X.shape
    terms = _category_terms(alpha, beta, X, rank, link)
    if not np.all(np.isfinite(terms.log_prob)):
        raise PreconditionError("Likelihood is zero at these parameters")
    prob = np.exp(terms.log_prob)

    f_hi = np.where(terms.has_hi, link.pdf(terms.eta_hi), 0.0)
    f_lo = np.where(terms.has_lo, link.pdf(terms.eta_lo), 0.0)
    d_hi = np.where(terms.has_hi, link.pdf_deriv(terms.eta_hi), 0.0)
    d_lo = np.where(terms.has_lo, link.pdf_deriv(terms.eta_lo), 0.0)
    a, b = f_hi / prob, f_lo / prob
    g_hi, g_lo = d_hi / prob, d_lo / prob
    diff = a - b

    hi_rows = terms.hi_idx[terms.has_hi]
    lo_rows = terms.lo_idx[terms.has_lo]
    score_alpha = (np.bincount(hi_rows, a[terms.has_hi], n_alpha)
                   - np.bincount(lo_rows, b[terms.has_lo], n_alpha))
    score_beta = -(X.T @ diff) if p else np.zeros(0)

    alpha_diag = (np.bincount(hi_rows, (g_hi - a * a)[terms.has_hi], n_alpha)
                  + np.bincount(lo_rows, (-g_lo - b * b)[terms.has_lo], n_alpha))
    both = terms.has_hi & terms.has_lo
    alpha_offdiag = np.bincount(terms.lo_idx[both], (a * b)[both], max(n_alpha - 1, 0))

    if p:
        w_hi = np.where(terms.has_hi, -(g_hi - a * diff), 0.0)
        w_lo = np.where(terms.has_lo, g_lo - b * diff, 0.0)
        observations = np.arange(n_obs)
        upper = sparse.csr_matrix((w_hi, (terms.hi_idx, observations)), shape=(n_alpha, n_obs))
        lower = sparse.csr_matrix((w_lo, (terms.lo_idx, observations)), shape=(n_alpha, n_obs))
        cross = np.asarray(upper @ X + lower @ X)
        weight = (g_hi - g_lo) - diff * diff
        beta_block = (X * weight[:, None]).T @ X
    else:
        cross = np.zeros((n_alpha, 0))
        beta_block = np.zeros((0, 0))

    hessian = StructuredHessian(alpha_diag, alpha_offdiag, cross, beta_block)
    return np.concatenate([score_alpha, score_beta]), hessian, float(np.sum(terms.log_prob))


def derivatives(alpha, beta, data: Dataset, index: OutcomeIndex,
                link: Union[str, LinkFamily]) -> Tuple[np.ndarray, StructuredHessian]:
    """Gradient and structured second derivative of the log-likelihood"""
    alpha, beta = _validate(alpha, beta, data, index)
    score, hessian, _ = derivatives_unchecked(alpha, beta, data.X, index.rank, LinkFamily.from_name(link))
    return score, hessian
