"""
Outcome categorization by region
Tabulates how many observations and distinct values fall in each outcome
region before and after discretization.
"""
from typing import List, Sequence

import numpy as np
import pandas as pd

from ..errors import ArgumentError
from .rounding import RoundingScheme, distinct_count, round_values

TOTAL_LABEL = "total"


def _regions(edges: Sequence[float]) -> List[tuple]:
    edges = [float(e) for e in edges]
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ArgumentError(f"Region edges must be strictly increasing, got {edges}")
    bounds = [-np.inf] + edges + [np.inf]
    return list(zip(bounds[:-1], bounds[1:]))


def _label(lower: float, upper: float) -> str:
    if np.isinf(lower):
        return f"< {upper:g}"
    if np.isinf(upper):
        return f">= {lower:g}"
    return f"[{lower:g}, {upper:g})"


def rounding_report(y, y_r, region_edges: Sequence[float]) -> pd.DataFrame:
    """Observation count and distinct counts before/after, per region of y"""
    y = np.asarray(y, dtype=float).reshape(-1)
    y_r = np.asarray(y_r, dtype=float).reshape(-1)
    if y.shape != y_r.shape:
        raise ArgumentError("Original and discretized outcomes differ in length")
    rows = []
    for lower, upper in _regions(region_edges):
        inside = (y >= lower) & (y < upper)
        rows.append({
            "region": _label(lower, upper),
            "lower": lower,
            "upper": upper,
            "n_obs": int(inside.sum()),
            "distinct_before": distinct_count(y[inside]),
            "distinct_after": distinct_count(y_r[inside]),
        })
    rows.append({
        "region": TOTAL_LABEL, "lower": -np.inf, "upper": np.inf, "n_obs": int(y.size),
        "distinct_before": distinct_count(y), "distinct_after": distinct_count(y_r),
    })
    return pd.DataFrame(rows)


def rounding_table(y, schemes: Sequence[RoundingScheme], region_edges: Sequence[float]) -> pd.DataFrame:
    """Distinct counts per region for several rounding schemes side by side"""
    y = np.asarray(y, dtype=float).reshape(-1)
    table = rounding_report(y, y, region_edges).drop(columns=["distinct_after"])
    table = table.rename(columns={"distinct_before": "original"})
    for scheme in schemes:
        rounded = round_values(y, scheme)
        table[scheme.label] = rounding_report(y, rounded, region_edges)["distinct_after"].to_numpy()
    return table
