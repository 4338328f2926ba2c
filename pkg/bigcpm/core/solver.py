"""
Block solvers for the CPM Newton system
The alpha block is factored as a banded (tridiagonal) Cholesky and the
beta block is reached through its Schur complement; the dense
(M-1+p) square matrix is never formed on this path.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg

from ..errors import SingularHessianError
from .likelihood import StructuredHessian


@dataclass
class BlockFactorization:
    """Factors of the negative Hessian [[A, B], [B^T, C]]"""
    alpha_chol: np.ndarray      # upper banded Cholesky of A, scipy layout (2, M-1)
    solved_cross: np.ndarray    # A^-1 B
    schur_chol: Tuple[np.ndarray, bool]  # cho_factor of S = C - B^T A^-1 B

    @property
    def p(self) -> int:
        return self.solved_cross.shape[1]


def factorize(information: StructuredHessian) -> BlockFactorization:
    """Factor the negative Hessian (the observed information)"""
    m, p = information.n_alpha, information.p
    banded = np.zeros((2, m))
    banded[1] = information.alpha_diag
    banded[0, 1:] = information.alpha_offdiag
    try:
        alpha_chol = linalg.cholesky_banded(banded, lower=False)
    except (linalg.LinAlgError, ValueError) as exc:
        raise SingularHessianError(f"Alpha block is not positive definite: {exc}", "alpha") from None

    if p == 0:
        return BlockFactorization(alpha_chol, np.zeros((m, 0)), (np.zeros((0, 0)), False))

    solved_cross = linalg.cho_solve_banded((alpha_chol, False), information.cross)
    schur = information.beta_block - information.cross.T @ solved_cross
    schur = 0.5 * (schur + schur.T)
    try:
        schur_chol = linalg.cho_factor(schur, lower=False)
    except (linalg.LinAlgError, ValueError) as exc:
        raise SingularHessianError(f"Beta Schur complement is not positive definite: {exc}", "beta") from None
    return BlockFactorization(alpha_chol, solved_cross, schur_chol)


def solve_factored(factors: BlockFactorization, rhs: np.ndarray) -> np.ndarray:
    """Solve information @ x = rhs using the block factors"""
    m = factors.alpha_chol.shape[1]
    rhs_alpha, rhs_beta = rhs[:m], rhs[m:]
    z = linalg.cho_solve_banded((factors.alpha_chol, False), rhs_alpha)
    if factors.p == 0:
        return z
    step_beta = linalg.cho_solve(factors.schur_chol, rhs_beta - factors.solved_cross.T @ rhs_alpha)
    step_alpha = z - factors.solved_cross @ step_beta
    return np.concatenate([step_alpha, step_beta])


def newton_step(score: np.ndarray, hessian: StructuredHessian) -> np.ndarray:
    """Newton direction -H^-1 score via the banded/Schur path"""
    return solve_factored(factorize(hessian.negated()), score)


def dense_newton_step(score: np.ndarray, hessian: StructuredHessian) -> np.ndarray:
    """Reference Newton direction from the full dense matrix"""
    information = -hessian.to_dense()
    try:
        factor = linalg.cho_factor(information, lower=False)
    except linalg.LinAlgError as exc:
        raise SingularHessianError(f"Hessian is not negative definite: {exc}", "full") from None
    return linalg.cho_solve(factor, score)


def tridiagonal_inverse_diagonal(alpha_chol: np.ndarray) -> np.ndarray:
    """Diagonal of A^-1 from the upper bidiagonal Cholesky factor of A"""
    d = alpha_chol[1]
    e = alpha_chol[0, 1:]
    m = d.size
    out = np.empty(m)
    out[m - 1] = 1.0 / d[m - 1] ** 2
    ratio_sq = (e / d[:-1]) ** 2
    inv_d_sq = 1.0 / d ** 2
    for i in range(m - 2, -1, -1):
        out[i] = inv_d_sq[i] + ratio_sq[i] * out[i + 1]
    return out


def variance_from_factors(factors: BlockFactorization) -> Tuple[np.ndarray, np.ndarray]:
    alpha_var = tridiagonal_inverse_diagonal(factors.alpha_chol)
    if factors.p == 0:
        return alpha_var, np.zeros((0, 0))
    beta_cov = linalg.cho_solve(factors.schur_chol, np.eye(factors.p))
    beta_cov = 0.5 * (beta_cov + beta_cov.T)
    correction = np.einsum("ij,ij->i", factors.solved_cross @ beta_cov, factors.solved_cross)
    return alpha_var + correction, beta_cov


def variance(hessian: StructuredHessian) -> Tuple[np.ndarray, np.ndarray]:
    """Alpha variances and the p x p beta covariance from the log-likelihood Hessian

    Only the diagonal of the alpha block of the inverse is formed.
    """
    return variance_from_factors(factorize(hessian.negated()))
