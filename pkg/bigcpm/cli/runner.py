"""
Batch runs for the bigcpm command line
Validates the run configuration, ingests CSV data and writes result files
"""
import difflib
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from ..analysis.compare import Approach, ApproachOutcome, fit_approach
from ..analysis.inference import predict
from ..config import default_workers
from ..core.data import Dataset
from ..core.link import LinkFamily
from ..core.model import SOLVERS, FitOptions
from ..core.serializer import ResultSerializer, metadata_dict
from ..discretize.report import rounding_report
from ..errors import ArgumentError, IngestError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"
MAX_LISTED_ROWS = 10


class RunConfig(BaseModel):
    """Validated settings for one batch fit"""
    model_config = ConfigDict(extra="forbid")

    input: Path
    outcome: str
    predictors: Optional[List[str]] = None
    link: str = LinkFamily.LOGIT.value
    approach: str = Approach.WHOLE.value
    subsets: Optional[int] = None
    target: Optional[int] = None
    seed: int = 0
    workers: Optional[int] = None
    output_dir: Path = Path("bigcpm_output")
    score_tol: float = 1e-8
    ll_tol: float = 1e-10
    max_iter: int = 100
    solver: str = "banded"
    predict_at: Optional[Path] = None
    report_edges: Optional[List[float]] = None
    allow_nonpositive: bool = False

    @field_validator("predictors", "report_edges", mode="before")
    @classmethod
    def _split_lists(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("link")
    @classmethod
    def _known_link(cls, value: str) -> str:
        return LinkFamily.from_name(value).value

    @field_validator("approach")
    @classmethod
    def _known_approach(cls, value: str) -> str:
        return Approach.from_name(value).value

    @field_validator("solver")
    @classmethod
    def _known_solver(cls, value: str) -> str:
        if value not in SOLVERS:
            raise ValueError(f"unknown solver '{value}'; choose one of: {', '.join(SOLVERS)}")
        return value

    @model_validator(mode="after")
    def _approach_parameters(self) -> "RunConfig":
        approach = Approach.from_name(self.approach)
        needed = approach.parameter_name
        if needed is not None and getattr(self, needed) is None:
            raise ValueError(f"approach {approach.value} needs {needed}")
        for name in ("subsets", "target"):
            if name != needed and getattr(self, name) is not None:
                logger.warning("Ignoring %s=%s: approach %s does not use it",
                               name, getattr(self, name), approach.value)
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be at least 1")
        return self

    @property
    def parameter(self) -> Optional[int]:
        needed = Approach.from_name(self.approach).parameter_name
        return getattr(self, needed) if needed else None

    def fit_options(self) -> FitOptions:
        return FitOptions(score_tol=self.score_tol, ll_tol=self.ll_tol,
                          max_iter=self.max_iter, solver=self.solver)


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Parse flat key=value lines; '#' starts a comment"""
    path = Path(path)
    if not path.is_file():
        raise ArgumentError(f"Config file not found: {path}")
    values: Dict[str, str] = {}
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ArgumentError(f"{path}:{number}: expected key=value, got '{line}'")
        key, value = line.split("=", 1)
        values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


def build_config(config_file: Optional[Union[str, Path]] = None,
                 overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Merge a config file with explicit flags; flags win"""
    values: Dict[str, Any] = read_config_file(config_file) if config_file else {}
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        )
        raise ArgumentError(f"Invalid run configuration: {problems}") from None


def _numeric_columns(path: Union[str, Path], columns: Sequence[str]) -> np.ndarray:
    """Selected columns as floats; rows with missing or non-numeric cells are dropped"""
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"Input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise IngestError(f"Cannot read {path}: {exc}") from None

    header = [str(name) for name in frame.columns]
    for name in columns:
        if name not in header:
            candidates = difflib.get_close_matches(name, header, n=3)
            hint = f"; did you mean {', '.join(repr(c) for c in candidates)}?" if candidates else ""
            raise IngestError(f"Column '{name}' not found in {path}{hint}")

    numeric = frame[list(columns)].apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    values = numeric.to_numpy(dtype=float).reshape(len(frame), len(columns))
    usable = np.all(np.isfinite(values), axis=1)
    rejected = np.flatnonzero(~usable)
    if rejected.size:
        # +2: one for the header, one for 1-based numbering
        lines = ", ".join(str(i + 2) for i in rejected[:MAX_LISTED_ROWS])
        more = f" and {rejected.size - MAX_LISTED_ROWS} more" if rejected.size > MAX_LISTED_ROWS else ""
        logger.warning("Rejected %d row(s) of %s with missing or non-numeric values (lines %s%s)",
                       rejected.size, path.name, lines, more)
    if not usable.any():
        raise IngestError(f"No usable rows in {path}")
    return values[usable]


def ingest_csv(path: Union[str, Path], outcome_col: str,
               predictor_cols: Optional[Sequence[str]] = None) -> Dataset:
    """Read a headed CSV into a Dataset

    Without predictor_cols every column other than the outcome is used.
    Categorical predictors must already be numerically encoded.
    """
    if predictor_cols is None:
        path = Path(path)
        if not path.is_file():
            raise IngestError(f"Input file not found: {path}")
        try:
            header = list(pd.read_csv(path, nrows=0).columns)
        except pd.errors.EmptyDataError:
            raise IngestError(f"{path} has no header row") from None
        predictor_cols = [str(name) for name in header if str(name) != outcome_col]
    predictor_cols = list(predictor_cols)
    values = _numeric_columns(path, [outcome_col] + predictor_cols)
    return Dataset(values[:, 0], values[:, 1:], predictor_cols)


def read_covariates(path: Union[str, Path], names: Sequence[str]) -> np.ndarray:
    """Covariate rows for prediction, columns ordered as in the fit"""
    return _numeric_columns(path, list(names))


def estimates_frame(fit) -> pd.DataFrame:
    """Alpha on the outcome grid; the top category carries alpha = inf"""
    return pd.DataFrame({
        "y": fit.distinct,
        "alpha": np.append(fit.alpha, np.inf),
        "alpha_se": np.append(fit.alpha_se, np.nan),
    })


def beta_frame(fit) -> pd.DataFrame:
    return pd.DataFrame({"name": list(fit.names), "beta": fit.beta, "se": fit.beta_se})


@dataclass
class RunArtifacts:
    """Where a run put its files and what it recorded"""
    output_dir: Path
    files: Dict[str, Path]
    metadata: Dict[str, Any]
    outcome: ApproachOutcome = field(repr=False)


class _OutputWriter:
    """Tracks every file written so a failed run can be rolled back"""

    def __init__(self, output_dir: Path):
        self.output_dir = output_dir
        self.created_dir = not output_dir.exists()
        self.written: List[Path] = []
        output_dir.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, frame: pd.DataFrame, **kwargs) -> Path:
        path = self.output_dir / name
        self.written.append(path)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan", **kwargs)
        return path

    def text(self, name: str, content: str) -> Path:
        path = self.output_dir / name
        self.written.append(path)
        path.write_text(content if content.endswith("\n") else content + "\n")
        return path

    def rollback(self):
        for path in self.written:
            path.unlink(missing_ok=True)
        if self.created_dir:
            try:
                self.output_dir.rmdir()
            except OSError:
                logger.debug("Leaving non-empty output directory %s", self.output_dir)


def _timed(fn, *args, **kwargs) -> Tuple[Any, float]:
    started = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - started


def run(config: RunConfig) -> RunArtifacts:
    """Ingest, fit with the configured approach and write all result files"""
    serializer = ResultSerializer()
    writer = _OutputWriter(config.output_dir)
    started = time.perf_counter()
    try:
        data, ingest_s = _timed(ingest_csv, config.input, config.outcome, config.predictors)
        logger.info("Loaded %s: N=%d, p=%d", config.input, data.N, data.p)
        workers = config.workers if config.workers is not None else default_workers()
        outcome = fit_approach(data, config.approach, config.parameter, config.link,
                               config.fit_options(), config.seed, workers, config.allow_nonpositive)
        fit = outcome.fit
        if not fit.converged:
            logger.warning("Fit did not converge; estimates are written but flagged in metadata")

        files = {
            "estimates": writer.csv("estimates.csv", estimates_frame(fit)),
            "beta": writer.csv("beta.csv", beta_frame(fit)),
            "beta_cov": writer.text("beta_cov.json", serializer.serialize(
                {"names": fit.names, "beta_cov": fit.beta_cov})),
            "fit": writer.text("fit.json", serializer.serialize_fit(fit)),
        }
        if config.predict_at is not None:
            X0 = read_covariates(config.predict_at, fit.names)
            files["predictions"] = writer.csv("predictions.csv", predict(fit, X0, fit.names))
        if config.report_edges:
            values = outcome.outcome_values if outcome.outcome_values is not None else data.y
            files["report"] = writer.csv("discretize_report.tsv",
                                         rounding_report(data.y, values, config.report_edges), sep="\t")

        metadata = metadata_dict(
            approach=outcome.approach.value,
            parameter=outcome.parameter,
            link=fit.link.value,
            input=str(config.input),
            outcome=config.outcome,
            predictors=fit.names,
            N=data.N,
            p=data.p,
            original_M=outcome.original_M,
            achieved_M=outcome.achieved_M,
            converged=bool(fit.converged),
            iterations=getattr(fit, "iterations", None),
            loglik=getattr(fit, "loglik", None),
            seed=config.seed,
            workers=workers,
            solver=config.solver,
            details=outcome.details,
            timings={"ingest_s": ingest_s, "fit_s": outcome.elapsed_s,
                     "total_s": time.perf_counter() - started},
            files={key: path.name for key, path in files.items()},
        )
        files["metadata"] = writer.text("metadata.json", serializer.serialize(metadata))
    except BaseException:
        writer.rollback()
        raise

    logger.info("Wrote %d files to %s", len(files), config.output_dir)
    return RunArtifacts(output_dir=config.output_dir, files=files, metadata=metadata, outcome=outcome)


def load_fit(path: Union[str, Path]):
    """Rebuild a fit saved as fit.json"""
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"Fit file not found: {path}")
    try:
        return ResultSerializer().deserialize_fit(path.read_text())
    except (KeyError, ValueError, TypeError) as exc:
        raise IngestError(f"Cannot read fit from {path}: {exc}") from None
