"""Inference from fitted models and approach comparison"""
from .inference import (ConditionalDistribution, conditional_cdf_table, conditional_distribution,
                        conditional_mean, conditional_median, predict)
from .compare import (Approach, ApproachComparison, ApproachOutcome, ApproachResult,
                      ComparisonEngine, SeedSweepResult, comparison_table, fit_approach)

__all__ = [
    "ConditionalDistribution", "conditional_cdf_table", "conditional_distribution",
    "conditional_mean", "conditional_median", "predict",
    "Approach", "ApproachComparison", "ApproachOutcome", "ApproachResult",
    "ComparisonEngine", "SeedSweepResult", "comparison_table", "fit_approach",
]
