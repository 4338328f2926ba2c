"""
Residual distribution families for cumulative probability models
Supplies F_eps = G^-1 and its first two derivatives
"""
import logging
from enum import Enum
from typing import NamedTuple, Union

import numpy as np
from scipy import special

from ..errors import ArgumentError, LinkDomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_CDF_FLOOR = np.finfo(float).tiny
_CDF_CEIL = np.nextafter(1.0, 0.0)
_SQRT_2PI = np.sqrt(2.0 * np.pi)


class LinkEvaluation(NamedTuple):
    """cdf, pdf and pdf derivative at u, plus the tail-clamp flag"""
    cdf: ArrayLike
    pdf: ArrayLike
    pdf_deriv: ArrayLike
    clamped: bool


class LinkFamily(Enum):
    """Residual distribution F_eps of the latent linear model

    loglog is the Gumbel (maximum) distribution F(u) = exp(-exp(-u)).
    cloglog is the minimum Gumbel F(u) = 1 - exp(-exp(u)), which gives
    proportional hazards.
    """
    LOGIT = "logit"
    PROBIT = "probit"
    LOGLOG = "loglog"
    CLOGLOG = "cloglog"

    @classmethod
    def from_name(cls, name: Union[str, "LinkFamily"]) -> "LinkFamily":
        if isinstance(name, LinkFamily):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ", ".join(member.value for member in cls)
            raise ArgumentError(f"Unknown link '{name}'; choose one of: {choices}") from None

    def cdf(self, u: ArrayLike) -> ArrayLike:
        with np.errstate(over="ignore", under="ignore"):
            if self is LinkFamily.LOGIT:
                return special.expit(u)
            if self is LinkFamily.PROBIT:
                return special.ndtr(u)
            if self is LinkFamily.LOGLOG:
                return np.exp(-np.exp(-u))
            return -np.expm1(-np.exp(u))

    def sf(self, u: ArrayLike) -> ArrayLike:
        """1 - cdf, computed without cancellation"""
        with np.errstate(over="ignore", under="ignore"):
            if self is LinkFamily.LOGIT:
                return special.expit(-u)
            if self is LinkFamily.PROBIT:
                return special.ndtr(-u)
            if self is LinkFamily.LOGLOG:
                return -np.expm1(-np.exp(-u))
            return np.exp(-np.exp(u))

    def pdf(self, u: ArrayLike) -> ArrayLike:
        with np.errstate(over="ignore", under="ignore"):
            if self is LinkFamily.LOGIT:
                return special.expit(u) * special.expit(-u)
            if self is LinkFamily.PROBIT:
                return np.exp(-0.5 * np.square(u)) / _SQRT_2PI
            if self is LinkFamily.LOGLOG:
                return np.exp(-u - np.exp(-u))
            return np.exp(u - np.exp(u))

    def pdf_deriv(self, u: ArrayLike) -> ArrayLike:
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            if self is LinkFamily.LOGIT:
                return self.pdf(u) * (special.expit(-u) - special.expit(u))
            if self is LinkFamily.PROBIT:
                return -u * self.pdf(u)
            density = self.pdf(u)
            if self is LinkFamily.LOGLOG:
                slope = np.expm1(-u)
            else:
                slope = -np.expm1(u)
            # 0 * inf in the far tail
            return np.where(density > 0.0, density * slope, 0.0)

    def log_cdf(self, u: ArrayLike) -> ArrayLike:
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            if self is LinkFamily.LOGIT:
                return special.log_expit(u)
            if self is LinkFamily.PROBIT:
                return special.log_ndtr(u)
            if self is LinkFamily.LOGLOG:
                return -np.exp(-u)
            return np.log(-np.expm1(-np.exp(u)))

    def log_sf(self, u: ArrayLike) -> ArrayLike:
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            if self is LinkFamily.LOGIT:
                return special.log_expit(-u)
            if self is LinkFamily.PROBIT:
                return special.log_ndtr(-u)
            if self is LinkFamily.LOGLOG:
                return np.log(-np.expm1(-np.exp(-u)))
            return -np.exp(u)

    def ppf(self, prob: ArrayLike) -> ArrayLike:
        """G = F_eps^-1 on the open unit interval"""
        prob = np.asarray(prob, dtype=float)
        if np.any((prob <= 0.0) | (prob >= 1.0)):
            raise ArgumentError("Link inverse requires probabilities strictly inside (0, 1)")
        if self is LinkFamily.LOGIT:
            return special.logit(prob)
        if self is LinkFamily.PROBIT:
            return special.ndtri(prob)
        if self is LinkFamily.LOGLOG:
            return -np.log(-np.log(prob))
        return np.log(-np.log1p(-prob))


def link_eval(link: Union[str, LinkFamily], u: ArrayLike) -> LinkEvaluation:
    """Evaluate F_eps(u), F_eps'(u) and F_eps''(u)

    cdf is kept strictly inside (0, 1); values that would round to an
    endpoint are clamped to the nearest representable interior value and
    the evaluation is flagged as clamped.
    """
    link = LinkFamily.from_name(link)
    values = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(values)):
        raise LinkDomainError(f"Link '{link.value}' evaluated at a non-finite argument")

    cdf = link.cdf(values)
    clamped_mask = (cdf < _CDF_FLOOR) | (cdf > _CDF_CEIL)
    clamped = bool(np.any(clamped_mask))
    if clamped:
        logger.debug("Link %s clamped %d tail value(s)", link.value, int(np.count_nonzero(clamped_mask)))
        cdf = np.clip(cdf, _CDF_FLOOR, _CDF_CEIL)

    pdf = link.pdf(values)
    pdf_deriv = link.pdf_deriv(values)
    if np.ndim(u) == 0:
        return LinkEvaluation(float(cdf), float(pdf), float(pdf_deriv), clamped)
    return LinkEvaluation(cdf, pdf, pdf_deriv, clamped)
