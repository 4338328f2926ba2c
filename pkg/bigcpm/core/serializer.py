"""
Result serialization for bigcpm
Converts fits, benchmark records and metadata to JSON and back
"""
import dataclasses
import json
import math
from enum import Enum
from typing import Any, Dict

import numpy as np

from .link import LinkFamily
from .model import CpmFit

_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


class ResultSerializer:
    """Serializes bigcpm results to/from JSON"""

    def __init__(self, indent: int = 2):
        self.indent = indent

    def serialize(self, obj: Any) -> str:
        """Convert a result object to a JSON string"""
        return json.dumps(self.to_jsonable(obj), indent=self.indent, sort_keys=False)

    def deserialize(self, text: str) -> Any:
        """Parse JSON written by serialize; non-finite markers stay strings"""
        return json.loads(text)

    def to_jsonable(self, obj: Any) -> Any:
        """Recursively convert to plain JSON types"""
        if isinstance(obj, dict):
            return {str(key): self.to_jsonable(value) for key, value in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self.to_jsonable(value) for value in obj]
        if isinstance(obj, np.ndarray):
            return self.to_jsonable(obj.tolist())
        if isinstance(obj, (bool, np.bool_)):
            return bool(obj)
        if isinstance(obj, (int, np.integer)):
            return int(obj)
        if isinstance(obj, (float, np.floating)):
            return self._float(float(obj))
        if obj is None or isinstance(obj, str):
            return obj
        return self.to_jsonable(self._json_serializer(obj))

    def serialize_fit(self, fit) -> str:
        """JSON for a whole-data or combined fit, enough to rebuild it with deserialize_fit"""
        payload = {
            "link": fit.link.value,
            "distinct": fit.distinct,
            "alpha": fit.alpha,
            "beta": fit.beta,
            "alpha_var": fit.alpha_var,
            "beta_cov": fit.beta_cov,
            "names": fit.names,
            "loglik": getattr(fit, "loglik", math.nan),
            "iterations": getattr(fit, "iterations", 0),
            "converged": fit.converged,
            "max_score": getattr(fit, "max_score", math.nan),
            "n_obs": getattr(fit, "n_obs", 0),
            "subsets": getattr(fit, "K", None),
        }
        return self.serialize(payload)

    def deserialize_fit(self, text: str) -> CpmFit:
        data = self.deserialize(text)
        p = len(data["beta"])
        return CpmFit(
            alpha=self._array(data["alpha"]),
            beta=self._array(data["beta"]),
            alpha_var=self._array(data["alpha_var"]),
            beta_cov=self._array(data["beta_cov"]).reshape(p, p),
            loglik=self._restore(data["loglik"]),
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
            distinct=self._array(data["distinct"]),
            link=LinkFamily.from_name(data["link"]),
            names=list(data.get("names", [])),
            max_score=self._restore(data.get("max_score", "nan")),
            n_obs=int(data.get("n_obs", 0)),
        )

    @staticmethod
    def _float(value: float) -> Any:
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value

    @staticmethod
    def _restore(value: Any) -> float:
        if isinstance(value, str):
            return _NONFINITE[value]
        return float(value)

    def _array(self, values) -> np.ndarray:
        def restore(item):
            if isinstance(item, list):
                return [restore(sub) for sub in item]
            return self._restore(item)
        return np.asarray(restore(values), dtype=float)

    def _json_serializer(self, obj: Any) -> Any:
        """Fallback conversion for objects json does not know"""
        if isinstance(obj, Enum):
            return obj.value
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}
        if hasattr(obj, "model_dump"):
            return obj.model_dump(mode="json")
        if hasattr(obj, "__dict__"):
            return obj.__dict__
        return str(obj)


def metadata_dict(**fields) -> Dict[str, Any]:
    """Plain-JSON metadata mapping"""
    return ResultSerializer().to_jsonable(fields)
