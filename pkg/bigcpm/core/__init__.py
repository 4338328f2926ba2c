"""Core CPM fitting: links, likelihood, solvers and persistence"""
from .link import LinkFamily, LinkEvaluation, link_eval
from .data import Dataset, OutcomeIndex, index_outcomes, empirical_cdf_cuts
from .likelihood import StructuredHessian, neg_loglik, derivatives
from .solver import newton_step, dense_newton_step, variance
from .model import FitOptions, CpmFit, fit_cpm, alpha_at
from .serializer import ResultSerializer
from .recorder import BenchRecorder

__all__ = [
    "LinkFamily", "LinkEvaluation", "link_eval",
    "Dataset", "OutcomeIndex", "index_outcomes", "empirical_cdf_cuts",
    "StructuredHessian", "neg_loglik", "derivatives",
    "newton_step", "dense_newton_step", "variance",
    "FitOptions", "CpmFit", "fit_cpm", "alpha_at",
    "ResultSerializer", "BenchRecorder",
]
