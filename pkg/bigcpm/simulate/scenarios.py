"""
Simulation scenarios for CPM studies
y* = beta'x + eps with a logistic or Gumbel residual, observed through
one of three monotone transforms y = H(y*).
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from ..config import as_generator, random_streams
from ..core.data import Dataset
from ..core.link import LinkFamily
from ..errors import ArgumentError

logger = logging.getLogger(__name__)

BINARY_PROB_RANGE = (0.05, 0.5)
CONTINUOUS_MEAN_RANGE = (0.0, 2.4)
DEFAULT_MC_DRAWS = 10_000
MIN_MC_DRAWS = 1_000


class Transform(Enum):
    IDENTITY = "identity"
    EXP = "exp"
    LOG_SHIFT = "log-shift"


class Residual(Enum):
    """Residual distribution and the link that matches it"""
    LOGISTIC = "logistic"
    GUMBEL = "gumbel"

    @property
    def link(self) -> LinkFamily:
        return LinkFamily.LOGIT if self is Residual.LOGISTIC else LinkFamily.LOGLOG


def _member(enum_type, value):
    if isinstance(value, enum_type):
        return value
    try:
        return enum_type(str(value).strip().lower().replace("_", "-"))
    except ValueError:
        choices = ", ".join(member.value for member in enum_type)
        raise ArgumentError(f"Unknown {enum_type.__name__.lower()} '{value}'; choose one of: {choices}") from None


def default_beta(p: int) -> np.ndarray:
    """Every other coefficient nonzero, magnitudes spread over [0.1, 1] with alternating signs"""
    beta = np.zeros(p)
    nonzero = np.arange(0, p, 2)
    if nonzero.size:
        signs = np.where(np.arange(nonzero.size) % 2 == 0, 1.0, -1.0)
        beta[nonzero] = signs * np.linspace(0.1, 1.0, nonzero.size)
    return beta


@dataclass
class ScenarioSpec:
    """One simulation scenario; beta_truth defaults to default_beta(p)"""
    N: int
    p: int
    transform: Transform = Transform.IDENTITY
    residual: Residual = Residual.LOGISTIC
    beta_truth: Optional[np.ndarray] = None
    y0_shift: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        self.transform = _member(Transform, self.transform)
        self.residual = _member(Residual, self.residual)
        if self.N < 2:
            raise ArgumentError(f"Scenario needs N >= 2, got {self.N}")
        if self.p < 0:
            raise ArgumentError(f"Predictor count must be non-negative, got {self.p}")
        if self.beta_truth is None:
            self.beta_truth = default_beta(self.p)
        self.beta_truth = np.asarray(self.beta_truth, dtype=float).reshape(-1)
        if self.beta_truth.size != self.p:
            raise ArgumentError(f"beta_truth has length {self.beta_truth.size}; expected p = {self.p}")
        if self.y0_shift is not None and self.transform is not Transform.LOG_SHIFT:
            raise ArgumentError("y0_shift applies only to the log-shift transform")

    @property
    def link(self) -> LinkFamily:
        return self.residual.link


@dataclass(frozen=True)
class AlphaTruth:
    """True transformation alpha = H^-1 and its forward map H"""
    transform: Transform
    y0_shift: float = 0.0

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.transform is Transform.IDENTITY:
            return y
        if self.transform is Transform.EXP:
            return np.log(y)
        return np.exp(y) - self.y0_shift

    def forward(self, y_star) -> np.ndarray:
        y_star = np.asarray(y_star, dtype=float)
        if self.transform is Transform.IDENTITY:
            return y_star
        if self.transform is Transform.EXP:
            return np.exp(y_star)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.log(y_star + self.y0_shift)


@dataclass
class SimulatedData:
    data: Dataset
    beta: np.ndarray
    alpha_truth: AlphaTruth
    spec: ScenarioSpec
    y_star: np.ndarray = field(repr=False, default=None)


def simulate_design(N: int, p: int, rng) -> np.ndarray:
    """Half binary predictors (listed first), half unit-variance normals"""
    n_binary = p // 2
    n_continuous = p - n_binary
    probs = np.linspace(*BINARY_PROB_RANGE, n_binary)
    means = np.linspace(*CONTINUOUS_MEAN_RANGE, n_continuous)
    binary = (rng.random((N, n_binary)) < probs).astype(float)
    continuous = rng.normal(loc=means, scale=1.0, size=(N, n_continuous))
    return np.hstack([binary, continuous])


def draw_residuals(residual: Residual, size: int, rng) -> np.ndarray:
    if residual is Residual.LOGISTIC:
        return rng.logistic(size=size)
    return rng.gumbel(size=size)


def simulate_dataset(spec: ScenarioSpec) -> SimulatedData:
    """Draw (y, X) for a scenario; bit-identical for a fixed seed"""
    rng = random_streams(spec.seed)["simulate"]
    X = simulate_design(spec.N, spec.p, rng)
    y_star = X @ spec.beta_truth + draw_residuals(spec.residual, spec.N, rng)

    shift = 0.0
    if spec.transform is Transform.LOG_SHIFT:
        shift = spec.y0_shift if spec.y0_shift is not None else float(np.ceil(-y_star.min()) + 1.0)
        if np.any(y_star + shift <= 0.0):
            raise ArgumentError(f"y0_shift={shift} does not make every y* + y0 positive")
    truth = AlphaTruth(spec.transform, shift)
    y = truth.forward(y_star)
    if not np.all(np.isfinite(y)):
        raise ArgumentError(f"Transform {spec.transform.value} produced non-finite outcomes")

    names = [f"x{j + 1}" for j in range(spec.p)]
    return SimulatedData(data=Dataset(y, X, names), beta=spec.beta_truth.copy(),
                         alpha_truth=truth, spec=spec, y_star=y_star)


def true_conditional(spec: ScenarioSpec, x0, n_mc: int = DEFAULT_MC_DRAWS, rng=None,
                     alpha_truth: Optional[AlphaTruth] = None) -> Tuple[float, float]:
    """Monte Carlo mean and median of H(beta'x0 + eps)"""
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != spec.p:
        raise ArgumentError(f"Covariate vector has length {x0.size}; the scenario has p = {spec.p}")
    if n_mc < MIN_MC_DRAWS:
        raise ArgumentError(f"Need at least {MIN_MC_DRAWS} Monte Carlo draws, got {n_mc}")
    if alpha_truth is None:
        if spec.transform is Transform.LOG_SHIFT and spec.y0_shift is None:
            alpha_truth = simulate_dataset(spec).alpha_truth
        else:
            alpha_truth = AlphaTruth(spec.transform, spec.y0_shift or 0.0)
    rng = as_generator(rng) if rng is not None else random_streams(spec.seed)["truth"]

    linear = float(spec.beta_truth @ x0) if spec.p else 0.0
    draws = alpha_truth.forward(linear + draw_residuals(spec.residual, n_mc, rng))
    finite = np.isfinite(draws)
    if not np.all(finite):
        logger.debug("Dropped %d non-finite Monte Carlo draws", int(np.count_nonzero(~finite)))
        draws = draws[finite]
    return float(np.mean(draws)), float(np.median(draws))
