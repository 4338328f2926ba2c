"""
Approach comparison for big-data CPM fitting
Fits the same data with whole-data, divide-and-combine, binning and
rounding, and compares every alternative against the whole-data fit.
"""
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..combine.engine import fit_divide_combine
from ..config import random_streams
from ..core.data import Dataset, index_outcomes
from ..core.link import LinkFamily
from ..core.model import FitOptions, fit_cpm
from ..discretize.binning import bin_equal_quantile
from ..discretize.rounding import RoundingMode, choose_rounding
from ..errors import ArgumentError, CpmError

logger = logging.getLogger(__name__)


class Approach(Enum):
    """Ways of fitting a CPM to a large dataset"""
    WHOLE = "whole"
    DIVIDE_COMBINE = "divide-combine"
    BIN = "bin"
    ROUND_DECIMAL = "round-decimal"
    ROUND_SIGDIGIT = "round-sigdigit"

    @classmethod
    def from_name(cls, name: Union[str, "Approach"]) -> "Approach":
        if isinstance(name, Approach):
            return name
        try:
            return cls(str(name).strip().lower().replace("_", "-"))
        except ValueError:
            choices = ", ".join(member.value for member in cls)
            raise ArgumentError(f"Unknown approach '{name}'; choose one of: {choices}") from None

    @property
    def parameter_name(self) -> Optional[str]:
        if self is Approach.DIVIDE_COMBINE:
            return "subsets"
        if self is Approach.WHOLE:
            return None
        return "target"


@dataclass
class ApproachOutcome:
    """A fitted model plus what the approach did to get it"""
    approach: Approach
    fit: Any
    parameter: Optional[int]
    original_M: int
    achieved_M: int
    elapsed_s: float
    details: Dict[str, Any] = field(default_factory=dict)
    outcome_values: Optional[np.ndarray] = field(default=None, repr=False)


def fit_approach(data: Dataset, approach: Union[str, Approach], parameter: Optional[int] = None,
                 link: Union[str, LinkFamily] = LinkFamily.LOGIT, opts: Optional[FitOptions] = None,
                 seed: int = 0, workers: Optional[int] = None,
                 allow_nonpositive: bool = False) -> ApproachOutcome:
    """Fit one approach; random streams are derived from seed"""
    approach = Approach.from_name(approach)
    link = LinkFamily.from_name(link)
    opts = opts or FitOptions()
    if approach is not Approach.WHOLE and parameter is None:
        raise ArgumentError(f"Approach {approach.value} needs --{approach.parameter_name}")
    streams = random_streams(seed)
    original_M = index_outcomes(data.y).M
    details: Dict[str, Any] = {}
    values = None
    started = time.perf_counter()

    if approach is Approach.WHOLE:
        fit = fit_cpm(data, link, opts)
    elif approach is Approach.DIVIDE_COMBINE:
        fit = fit_divide_combine(data, int(parameter), link, opts, streams["partition"], workers)
        details["subsets"] = fit.subset_fits
        details["subset_sizes"] = sorted(set(int(n) for n in fit.plan.subset_sizes))
    elif approach is Approach.BIN:
        binned = bin_equal_quantile(data.y, int(parameter), streams["binning"])
        details["bins"] = {"M_b": binned.M_b, "achieved": binned.achieved,
                           "bin_sizes": sorted(set(int(n) for n in binned.bin_sizes))}
        values = binned.y_b
        fit = fit_cpm(data.with_outcome(binned.y_b), link, opts)
    else:
        mode = RoundingMode.DECIMAL if approach is Approach.ROUND_DECIMAL else RoundingMode.SIGDIGIT
        scheme, rounded = choose_rounding(data.y, int(parameter), mode, allow_nonpositive)
        details["scheme"] = {"mode": scheme.mode.value, "s": scheme.s, "t": scheme.t,
                             "achieved": scheme.achieved, "target_missed": scheme.target_missed,
                             "signed_extension": bool(allow_nonpositive and np.any(data.y <= 0))}
        values = rounded
        fit = fit_cpm(data.with_outcome(rounded), link, opts)

    return ApproachOutcome(approach=approach, fit=fit, parameter=parameter, original_M=original_M,
                           achieved_M=int(fit.distinct.size), elapsed_s=time.perf_counter() - started,
                           details=details, outcome_values=values)


@dataclass
class ApproachResult:
    """One approach measured against the whole-data fit"""
    approach: Approach
    parameter: Optional[int]
    success: bool
    achieved_M: int = 0
    elapsed_s: float = 0.0
    max_abs_beta_diff: float = float("nan")
    mean_se_ratio: float = float("nan")
    beta: Optional[np.ndarray] = None
    beta_se: Optional[np.ndarray] = None
    error: Optional[str] = None


@dataclass
class ApproachComparison:
    """Whole-data reference plus every alternative"""
    reference: ApproachOutcome
    results: List[ApproachResult]
    recommendations: List[str]


@dataclass
class SeedSweepResult:
    """Spread of divide-and-combine estimates across partition seeds"""
    seeds: List[int]
    betas: np.ndarray
    mean_se: np.ndarray
    spread: np.ndarray

    @property
    def spread_to_se(self) -> np.ndarray:
        """Partition-induced SD relative to the sampling SE, per coefficient"""
        return self.spread / self.mean_se


class ComparisonEngine:
    """Runs the big-data approaches on one dataset and compares them"""

    def __init__(self, link: Union[str, LinkFamily] = LinkFamily.LOGIT,
                 opts: Optional[FitOptions] = None, workers: Optional[int] = None):
        self.link = LinkFamily.from_name(link)
        self.opts = opts or FitOptions()
        self.workers = workers

    def compare(self, data: Dataset, subsets: Optional[int] = None, target: Optional[int] = None,
                seed: int = 0, allow_nonpositive: bool = False) -> ApproachComparison:
        """Fit whole data, then each approach whose parameter is given"""
        reference = fit_approach(data, Approach.WHOLE, None, self.link, self.opts, seed)
        scenarios = []
        if subsets is not None:
            scenarios.append((Approach.DIVIDE_COMBINE, subsets))
        if target is not None:
            scenarios.extend([(Approach.BIN, target), (Approach.ROUND_DECIMAL, target)])
            if allow_nonpositive or np.all(data.y > 0):
                scenarios.append((Approach.ROUND_SIGDIGIT, target))

        results = []
        for approach, parameter in scenarios:
            try:
                outcome = fit_approach(data, approach, parameter, self.link, self.opts, seed,
                                       self.workers, allow_nonpositive)
            except CpmError as exc:
                logger.warning("Approach %s failed: %s", approach.value, exc)
                results.append(ApproachResult(approach, parameter, success=False, error=str(exc)))
                continue
            results.append(self._measure(outcome, reference))

        return ApproachComparison(reference=reference, results=results,
                                  recommendations=self._generate_recommendations(results))

    def seed_sweep(self, data: Dataset, subsets: int, seeds: Sequence[int]) -> SeedSweepResult:
        """Repeat divide-and-combine over several partition seeds"""
        seeds = list(seeds)
        if len(seeds) < 2:
            raise ArgumentError("A seed sweep needs at least two seeds")
        betas, ses = [], []
        for seed in seeds:
            fit = fit_approach(data, Approach.DIVIDE_COMBINE, subsets, self.link, self.opts,
                               seed, self.workers).fit
            betas.append(fit.beta)
            ses.append(fit.beta_se)
        betas = np.vstack(betas)
        return SeedSweepResult(seeds=seeds, betas=betas, mean_se=np.vstack(ses).mean(axis=0),
                               spread=betas.std(axis=0, ddof=1))

    def _measure(self, outcome: ApproachOutcome, reference: ApproachOutcome) -> ApproachResult:
        fit, whole = outcome.fit, reference.fit
        diff = np.abs(fit.beta - whole.beta)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = fit.beta_se / whole.beta_se
        return ApproachResult(
            approach=outcome.approach, parameter=outcome.parameter, success=True,
            achieved_M=outcome.achieved_M, elapsed_s=outcome.elapsed_s,
            max_abs_beta_diff=float(diff.max()) if diff.size else 0.0,
            mean_se_ratio=float(np.mean(ratio)) if ratio.size else float("nan"),
            beta=fit.beta, beta_se=fit.beta_se,
        )

    def _generate_recommendations(self, results: List[ApproachResult]) -> List[str]:
        recommendations = []
        failed = [r for r in results if not r.success]
        if failed:
            names = ", ".join(r.approach.value for r in failed)
            recommendations.append(f"Some approaches failed ({names}) - check subset sizes and targets")
        for result in results:
            if not result.success:
                continue
            if result.approach is Approach.DIVIDE_COMBINE and result.mean_se_ratio > 1.5:
                recommendations.append("Divide-and-combine SEs are well above whole-data SEs - use fewer subsets")
            elif result.approach is not Approach.DIVIDE_COMBINE and abs(result.mean_se_ratio - 1.0) > 0.05:
                recommendations.append(f"{result.approach.value} SEs differ from whole data by more than 5% "
                                       "- raise the target")
        if results and not recommendations:
            recommendations.append("All approaches agree with the whole-data fit")
        return recommendations


def comparison_table(comparison: ApproachComparison) -> pd.DataFrame:
    """One row per approach, the whole-data fit first"""
    whole = comparison.reference
    rows = [{"approach": Approach.WHOLE.value, "parameter": None, "success": True,
             "achieved_M": whole.achieved_M, "elapsed_s": whole.elapsed_s,
             "max_abs_beta_diff": 0.0, "mean_se_ratio": 1.0, "error": None}]
    for r in comparison.results:
        rows.append({"approach": r.approach.value, "parameter": r.parameter, "success": r.success,
                     "achieved_M": r.achieved_M, "elapsed_s": r.elapsed_s,
                     "max_abs_beta_diff": r.max_abs_beta_diff, "mean_se_ratio": r.mean_se_ratio,
                     "error": r.error})
    return pd.DataFrame(rows)
