"""
Rounding with refinement
A value is rounded at place s after scaling by the refinement level t;
choose_rounding searches (s, t) for a target number of distinct values.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import ArgumentError

logger = logging.getLogger(__name__)

T_GRID = np.arange(10, 101) / 10.0
MAX_PLACE = 300
TARGET_TOLERANCE = 0.01

# half-boundary snap, in units of the scaled value's spacing
_HALF_SNAP_ULPS = 4.0


class RoundingMode(Enum):
    """Decimal place or significant digits"""
    DECIMAL = "decimal"
    SIGDIGIT = "sigdigit"

    @classmethod
    def from_name(cls, name: Union[str, "RoundingMode"]) -> "RoundingMode":
        if isinstance(name, RoundingMode):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ArgumentError(f"Unknown rounding mode '{name}'; choose decimal or sigdigit") from None


@dataclass(frozen=True)
class RoundingScheme:
    """(mode, s, t) plus the distinct count it achieved, when known"""
    mode: RoundingMode
    s: int
    t: float = 1.0
    achieved: Optional[int] = None
    target_missed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", RoundingMode.from_name(self.mode))
        if not 1.0 <= self.t <= 10.0:
            raise ArgumentError(f"Refinement level t={self.t} must lie in [1, 10]")
        if self.mode is RoundingMode.SIGDIGIT and self.s < 1:
            raise ArgumentError(f"Significant-digit count s={self.s} must be at least 1")

    @property
    def label(self) -> str:
        return f"{self.mode.value}({self.s},{self.t:g})"


def _decimal_exponent(magnitude: np.ndarray) -> np.ndarray:
    """floor(log10 x) for x > 0, corrected at exact powers of ten"""
    with np.errstate(divide="ignore"):
        exponent = np.floor(np.log10(magnitude))
    exponent = np.where(np.isfinite(exponent), exponent, 0.0)
    exponent = np.where(np.power(10.0, exponent + 1) <= magnitude, exponent + 1, exponent)
    exponent = np.where(np.power(10.0, exponent) > magnitude, exponent - 1, exponent)
    return exponent.astype(np.int64)


def _round_half_away(scaled: np.ndarray) -> np.ndarray:
    magnitude = np.abs(scaled)
    whole = np.floor(magnitude)
    fraction = magnitude - whole
    near_half = np.abs(fraction - 0.5) <= _HALF_SNAP_ULPS * np.spacing(np.maximum(magnitude, 1.0))
    rounded = np.where(near_half, whole + 1.0, np.floor(magnitude + 0.5))
    return np.copysign(rounded, scaled)


def round_at_place(a, place, t: float = 1.0) -> np.ndarray:
    """Round t*a half away from zero at decimal place `place`, then divide by t"""
    values = np.asarray(a, dtype=float)
    place = np.asarray(place, dtype=np.int64)
    power = np.power(10.0, np.abs(place))
    factor = np.where(place >= 0, t * power, t / power)
    return _round_half_away(values * factor) / factor


def round_values(y, scheme: RoundingScheme) -> np.ndarray:
    """Apply a rounding scheme elementwise"""
    values = np.asarray(y, dtype=float)
    if scheme.mode is RoundingMode.DECIMAL:
        return round_at_place(values, scheme.s, scheme.t)
    magnitude = np.abs(values)
    nonzero = magnitude > 0.0
    place = scheme.s - 1 - _decimal_exponent(np.where(nonzero, magnitude, 1.0))
    return np.where(nonzero, round_at_place(values, place, scheme.t), 0.0)


def round_value(a: float, scheme: RoundingScheme) -> float:
    """Round a single value; 0 maps to 0 in significant-digit mode"""
    return float(round_values(np.asarray(a, dtype=float), scheme))


def distinct_count(values: np.ndarray) -> int:
    """Number of distinct values of an array"""
    ordered = np.sort(np.asarray(values, dtype=float).reshape(-1))
    return int(ordered.size and 1 + np.count_nonzero(np.diff(ordered)))


def choose_rounding(y, M_r: int, mode: Union[str, RoundingMode] = RoundingMode.SIGDIGIT,
                    allow_nonpositive: bool = False) -> Tuple[RoundingScheme, np.ndarray]:
    """Find (s, t) whose rounding leaves about M_r distinct values"""
    mode = RoundingMode.from_name(mode)
    values = np.asarray(y, dtype=float).reshape(-1)
    if not np.all(np.isfinite(values)):
        raise ArgumentError("Outcome contains non-finite values")
    unique = np.unique(values)
    if not isinstance(M_r, (int, np.integer)) or M_r < 2 or M_r >= unique.size:
        raise ArgumentError(f"Target M_r={M_r} must satisfy 2 <= M_r < {unique.size} (distinct outcomes)")
    if mode is RoundingMode.SIGDIGIT and not allow_nonpositive and unique[0] <= 0.0:
        raise ArgumentError("Significant-digit rounding needs positive outcomes; "
                            "enable allow_nonpositive for the signed extension")

    def count(s: int, t: float = 1.0) -> int:
        return distinct_count(round_values(unique, RoundingScheme(mode, s, t)))

    if mode is RoundingMode.SIGDIGIT:
        s, floor_place = 1, 1
    else:
        largest = np.max(np.abs(unique))
        s = -int(_decimal_exponent(np.array([largest]))[0]) - 1 if largest > 0 else 0
        floor_place = -MAX_PLACE

    while count(s) > M_r and s > floor_place:
        s -= 1
    if count(s) > M_r:
        # only reachable in significant-digit mode
        logger.warning("One significant digit already gives %d distinct values (target %d)", count(s), M_r)
        scheme = RoundingScheme(mode, s, 1.0, achieved=count(s), target_missed=True)
        return scheme, round_values(values, scheme)

    while count(s + 1) <= M_r:
        s += 1
        if s > MAX_PLACE:
            raise ArgumentError("Rounding place search did not terminate")

    base = count(s)
    if base == M_r:
        t, achieved = 1.0, base
    else:
        counts = np.array([count(s, t) for t in T_GRID])
        gaps = np.abs(np.log(counts) - np.log(M_r))
        best = int(np.argmin(gaps))  # first minimum: smaller t wins ties
        t, achieved = float(T_GRID[best]), int(counts[best])

    missed = abs(achieved - M_r) > TARGET_TOLERANCE * M_r
    if missed:
        logger.warning("Rounding reached %d distinct values for target %d (s=%d, t=%g)", achieved, M_r, s, t)
    scheme = RoundingScheme(mode, s, t, achieved=achieved, target_missed=missed)
    return scheme, round_values(values, scheme)
