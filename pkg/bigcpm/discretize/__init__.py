"""Outcome discretization: equal-quantile binning and rounding"""
from .binning import BinningResult, bin_equal_quantile
from .rounding import (RoundingMode, RoundingScheme, choose_rounding, distinct_count,
                       round_at_place, round_value, round_values)
from .report import rounding_report, rounding_table

__all__ = [
    "BinningResult", "bin_equal_quantile",
    "RoundingMode", "RoundingScheme", "choose_rounding", "distinct_count",
    "round_at_place", "round_value", "round_values",
    "rounding_report", "rounding_table",
]
