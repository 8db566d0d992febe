"""Failure-rate laws and the mode-persistence model built on them.

A component is either ok or broken, starts ok when its physical unit goes
on-line, and fails at most once (broken is absorbing).  The failure law is
given as a hazard model: a constant rate (exponential lifetimes, the MTBF
case) or a Weibull law for wear-in / wear-out.  Everything downstream only
needs two quantities derived here: the probability that a unit known ok at
t_ok has failed by t, and the 2x2 ok/broken transition matrix over an
interval.

Times are hours, measured from the unit's own commissioning epoch.  For a
constant rate only the interval length matters; for Weibull the absolute
ages matter, which is why callers track per-unit reference times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


def _require_positive_finite(value: float, name: str) -> None:
    if not (math.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class ConstantRate:
    """Constant hazard: failures arrive at a fixed rate per hour."""

    rate: float

    def __post_init__(self):
        _require_positive_finite(self.rate, "rate")

    def cumulative_hazard(self, t: float) -> float:
        return self.rate * t

    @property
    def mtbf(self) -> float:
        """Mean lifetime, 1/rate."""
        return 1.0 / self.rate


@dataclass(frozen=True)
class Weibull:
    """Weibull hazard with dimensionless shape and scale in hours.

    shape < 1 models wear-in (early failures), shape > 1 wear-out.
    shape = 1 is exactly the constant-rate law with rate 1/scale.
    """

    shape: float
    scale: float

    def __post_init__(self):
        _require_positive_finite(self.shape, "shape")
        _require_positive_finite(self.scale, "scale")

    def cumulative_hazard(self, t: float) -> float:
        return (t / self.scale) ** self.shape

    @property
    def mtbf(self) -> float:
        """Mean lifetime, scale * gamma(1 + 1/shape)."""
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)


HazardModel = ConstantRate | Weibull


def rate_from_mtbf(mtbf: float) -> float:
    """Convert a mean time between failures into a constant failure rate."""
    if not (isinstance(mtbf, (int, float)) and math.isfinite(mtbf) and mtbf > 0):
        raise InvalidParameterError(f"mtbf must be finite and > 0, got {mtbf!r}")
    return 1.0 / mtbf


def cumulative_hazard(model: HazardModel, t: float) -> float:
    """Integrated hazard over [0, t]; 0 at t = 0 and non-decreasing in t."""
    if not (math.isfinite(t) and t >= 0):
        raise InvalidParameterError(f"t must be finite and >= 0, got {t!r}")
    return model.cumulative_hazard(t)


def conditional_failure_probability(model: HazardModel, t_ok: float, t: float) -> float:
    """Probability that a unit known ok at t_ok has failed by time t.

    Both times are measured from the unit's commissioning epoch.  The value
    is 1 - exp(-(H(t) - H(t_ok))), computed with expm1 so that tiny
    intervals keep full precision.
    """
    if not (math.isfinite(t_ok) and t_ok >= 0):
        raise InvalidParameterError(f"t_ok must be finite and >= 0, got {t_ok!r}")
    if not (math.isfinite(t) and t >= t_ok):
        raise InvalidParameterError(f"t must be finite and >= t_ok={t_ok}, got {t!r}")
    delta = model.cumulative_hazard(t) - model.cumulative_hazard(t_ok)
    return -math.expm1(-delta)


@dataclass(frozen=True)
class TransitionMatrix:
    """Mode persistence over one interval: rows=from, columns=to.

    Broken is absorbing, so p_broken_ok is identically 0 and the broken row
    is (0, 1).
    """

    p_ok_ok: float
    p_ok_broken: float
    p_broken_ok: float
    p_broken_broken: float

    def __post_init__(self):
        for name in ("p_ok_ok", "p_ok_broken", "p_broken_ok", "p_broken_broken"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise InvalidParameterError(f"{name} must be in [0, 1], got {v!r}")
        if self.p_broken_ok != 0.0:
            raise InvalidParameterError("broken is absorbing: p_broken_ok must be 0")
        if abs(self.p_ok_ok + self.p_ok_broken - 1.0) > 1e-12:
            raise InvalidParameterError("ok row must sum to 1")
        if abs(self.p_broken_ok + self.p_broken_broken - 1.0) > 1e-12:
            raise InvalidParameterError("broken row must sum to 1")

    def as_array(self) -> np.ndarray:
        """2x2 array, index 0 = ok, index 1 = broken."""
        return np.array(
            [
                [self.p_ok_ok, self.p_ok_broken],
                [self.p_broken_ok, self.p_broken_broken],
            ]
        )


def transition_matrix(model: HazardModel, t1: float, t2: float) -> TransitionMatrix:
    """Persistence of one component's mode from t1 to t2 (unit-epoch times)."""
    p_fail = conditional_failure_probability(model, t1, t2)
    return TransitionMatrix(
        p_ok_ok=1.0 - p_fail,
        p_ok_broken=p_fail,
        p_broken_ok=0.0,
        p_broken_broken=1.0,
    )
