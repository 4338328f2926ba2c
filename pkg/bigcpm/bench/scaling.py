"""
Log-log scaling models for benchmark records
time ~ c * N^a * M^b * p^d and memory ~ c * (M-1+p)^e, fit by least
squares on the log10 scale.
"""
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..core.serializer import ResultSerializer
from ..errors import ArgumentError, ModelFitError

RESPONSES = ("time", "memory")
PREDICTORS = ("N", "M", "p", "M-1+p")
MEMORY_MIN_M = 5_000
MIN_RECORDS = 5


@dataclass
class LogLogModel:
    """response = constant * prod(predictor ** exponent)"""
    response: str
    constant: float
    exponents: Dict[str, float]
    r_squared: float
    n_records: int
    fixed_exponents: bool = False
    filters: Dict[str, Any] = field(default_factory=dict)

    def predict(self, **values: float) -> float:
        out = self.constant
        for name, exponent in self.exponents.items():
            out *= _predictor_value(values, name) ** exponent
        return float(out)


def _as_dict(record) -> Dict[str, Any]:
    if dataclasses.is_dataclass(record):
        return dataclasses.asdict(record)
    return dict(record)


def _predictor_value(row: Mapping[str, Any], name: str) -> float:
    if name == "M-1+p":
        return float(row["M"]) - 1.0 + float(row["p"])
    return float(row[name])


def _response_value(row: Mapping[str, Any], response: str) -> float:
    if response == "time":
        return float(row["time"])
    return float(row.get("fit_mem") or row["peak_mem"])


def _usable_rows(records, response: str, min_M: Optional[int]) -> List[Dict[str, Any]]:
    if response not in RESPONSES:
        raise ArgumentError(f"Unknown response '{response}'; choose one of: {', '.join(RESPONSES)}")
    rows = [_as_dict(r) for r in records]
    rows = [r for r in rows if r.get("status", "ok") == "ok"]
    if min_M is not None:
        rows = [r for r in rows if r["M"] >= min_M]
    return rows


def _log_response(rows, response: str) -> np.ndarray:
    values = np.array([_response_value(r, response) for r in rows])
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        raise ModelFitError(f"All {response} values must be positive and finite")
    return np.log10(values)


def _log_predictors(rows, names: Sequence[str]) -> np.ndarray:
    values = np.array([[_predictor_value(r, name) for name in names] for r in rows])
    values = values.reshape(len(rows), len(names))
    if np.any(values <= 0.0):
        raise ModelFitError("Predictor values must be positive on the log scale")
    return np.log10(values)


def _r_squared(observed: np.ndarray, fitted: np.ndarray) -> float:
    ss_res = float(np.sum((observed - fitted) ** 2))
    ss_tot = float(np.sum((observed - observed.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def fit_loglog_model(records, response: str = "time", predictors: Optional[Sequence[str]] = None,
                     min_M: Optional[int] = None) -> LogLogModel:
    """OLS of log10(response) on log10 of the predictors

    The memory model keeps only records with M >= min_M (default 5000).
    """
    if predictors is None:
        predictors = ("N", "M", "p") if response == "time" else ("M-1+p",)
    unknown = [name for name in predictors if name not in PREDICTORS]
    if unknown or not predictors:
        raise ArgumentError(f"Unknown predictor(s) {unknown}; choose from: {', '.join(PREDICTORS)}")
    if response == "memory" and min_M is None:
        min_M = MEMORY_MIN_M

    rows = _usable_rows(records, response, min_M)
    if len(rows) < MIN_RECORDS:
        raise ModelFitError(f"Need at least {MIN_RECORDS} usable records, got {len(rows)}"
                            + (f" with M >= {min_M}" if min_M is not None else ""))
    observed = _log_response(rows, response)
    design = np.column_stack([np.ones(len(rows)), _log_predictors(rows, predictors)])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise ModelFitError(f"Design is rank-deficient for predictors {list(predictors)}")

    coef, *_ = np.linalg.lstsq(design, observed, rcond=None)
    return LogLogModel(
        response=response, constant=float(10.0 ** coef[0]),
        exponents={name: float(c) for name, c in zip(predictors, coef[1:])},
        r_squared=_r_squared(observed, design @ coef), n_records=len(rows),
        filters={"min_M": min_M} if min_M is not None else {},
    )


def fit_fixed_exponent_model(records, response: str, exponents: Mapping[str, float],
                             min_M: Optional[int] = None) -> LogLogModel:
    """Estimate only the constant with the exponents held fixed"""
    unknown = [name for name in exponents if name not in PREDICTORS]
    if unknown or not exponents:
        raise ArgumentError(f"Unknown predictor(s) {unknown}; choose from: {', '.join(PREDICTORS)}")
    rows = _usable_rows(records, response, min_M)
    if len(rows) < 2:
        raise ModelFitError(f"Need at least 2 usable records, got {len(rows)}")
    names = list(exponents)
    observed = _log_response(rows, response)
    offset = _log_predictors(rows, names) @ np.array([exponents[n] for n in names], dtype=float)
    log_constant = float(np.mean(observed - offset))
    return LogLogModel(
        response=response, constant=10.0 ** log_constant,
        exponents={name: float(exponents[name]) for name in names},
        r_squared=_r_squared(observed, offset + log_constant), n_records=len(rows),
        fixed_exponents=True, filters={"min_M": min_M} if min_M is not None else {},
    )


def records_frame(records) -> pd.DataFrame:
    return pd.DataFrame([_as_dict(r) for r in records])


def write_records_csv(records, path: Union[str, Path]) -> Path:
    path = Path(path)
    records_frame(records).to_csv(path, index=False)
    return path


def write_models_json(models: Mapping[str, LogLogModel], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(ResultSerializer().serialize(dict(models)) + "\n")
    return path


def write_loglog_tsv(records, path: Union[str, Path]) -> Path:
    """Plot-ready log10 columns for the time and memory scaling plots"""
    path = Path(path)
    frame = records_frame(records)
    if "status" in frame:
        frame = frame[frame["status"] == "ok"]
    out = pd.DataFrame({
        "N": frame["N"], "M": frame["M"], "p": frame["p"],
        "M_minus_1_plus_p": frame["M"] - 1 + frame["p"],
        "log10_N": np.log10(frame["N"]), "log10_M": np.log10(frame["M"]), "log10_p": np.log10(frame["p"]),
        "log10_M_minus_1_plus_p": np.log10(frame["M"] - 1 + frame["p"]),
        "log10_time": np.log10(frame["time"]),
        "log10_memory": np.log10(frame["fit_mem"].where(frame["fit_mem"] > 0, frame["peak_mem"])),
    })
    out.to_csv(path, sep="\t", index=False, float_format="%.6f")
    return path
