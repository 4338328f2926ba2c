"""Divide-and-combine estimation for large datasets"""
from .partition import PartitionPlan, partition
from .kvectors import KVectorTable, build_kvectors
from .engine import (CombinedFit, SubsetDiagnostics, combine, enforce_monotonicity,
                     fit_divide_combine, near_constant_columns)

__all__ = [
    "PartitionPlan", "partition",
    "KVectorTable", "build_kvectors",
    "CombinedFit", "SubsetDiagnostics", "combine", "enforce_monotonicity",
    "fit_divide_combine", "near_constant_columns",
]
