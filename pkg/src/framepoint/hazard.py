"""Piecewise-constant intensity profiles and their cumulative mass.

The per-frame rates define a step-function intensity on [0, T]; its
integral is continuous piecewise linear, interpolating the prefix-sum
knots. Both directions (evaluation and inversion) are exact at the knots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, ShapeError
from .grid import FrameGrid

#: scores are clamped to +/- this bound before exponentiation
LOG_RATE_CLAMP = 30.0


@dataclass(frozen=True)
class IntensityProfile:
    """Strictly positive per-frame rates over a frame grid."""

    rates: np.ndarray
    grid: FrameGrid

    def __post_init__(self):
        rates = np.ascontiguousarray(self.rates, dtype=np.float64)
        if rates.ndim != 1:
            raise ShapeError(f"rates must be one-dimensional, got shape "
                             f"{rates.shape}")
        if rates.shape[0] != self.grid.num_frames:
            raise ShapeError(f"{rates.shape[0]} rates for a grid of "
                             f"{self.grid.num_frames} frames")
        if not np.all(np.isfinite(rates)) or np.any(rates <= 0.0):
            raise DomainError("rates must be finite and strictly positive")
        object.__setattr__(self, "rates", rates)

    @classmethod
    def from_log_rates(cls, log_rates, grid: FrameGrid) -> "IntensityProfile":
        """Exponentiate upstream log-rates, clamped to +/-LOG_RATE_CLAMP."""
        lr = np.asarray(log_rates, dtype=np.float64)
        if not np.all(np.isfinite(lr)):
            raise DomainError("log rates must be finite")
        return cls(rates=np.exp(np.clip(lr, -LOG_RATE_CLAMP, LOG_RATE_CLAMP)),
                   grid=grid)

    def scaled(self, factor: float) -> "IntensityProfile":
        if not (factor > 0):
            raise DomainError("scale factor must be positive")
        return IntensityProfile(rates=self.rates * factor, grid=self.grid)


@dataclass(frozen=True)
class CumulativeHazard:
    """Prefix-sum knots H_0..H_T of an intensity profile (H_0 = 0)."""

    knots: np.ndarray
    rates: np.ndarray
    grid: FrameGrid

    def __post_init__(self):
        knots = np.ascontiguousarray(self.knots, dtype=np.float64)
        rates = np.ascontiguousarray(self.rates, dtype=np.float64)
        if knots.shape[0] != self.grid.num_frames + 1:
            raise ShapeError("knot count must be num_frames + 1")
        if knots[0] != 0.0 or np.any(np.diff(knots) <= 0.0):
            raise DomainError("knots must start at 0 and increase strictly")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "rates", rates)

    @property
    def total(self) -> float:
        """Total mass over [0, T]."""
        return float(self.knots[-1])


def build_cumulative(profile: IntensityProfile) -> CumulativeHazard:
    knots = np.zeros(profile.grid.num_frames + 1, dtype=np.float64)
    np.cumsum(profile.rates, out=knots[1:])
    return CumulativeHazard(knots=knots, rates=profile.rates, grid=profile.grid)


def eval_hazard(profile: IntensityProfile, t):
    """Rate of the frame containing t, for t in [0, T)."""
    T = profile.grid.num_frames
    scalar = np.isscalar(t)
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(ts < 0.0) or np.any(ts >= T):
        raise DomainError(f"hazard evaluation requires t in [0, {T})")
    out = profile.rates[np.floor(ts).astype(np.int64)]
    return float(out[0]) if scalar else out


def eval_cumulative(hazard: CumulativeHazard, t):
    """Cumulative mass at t, for t in [0, T]."""
    T = hazard.grid.num_frames
    scalar = np.isscalar(t)
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(ts < 0.0) or np.any(ts > T):
        raise DomainError(f"cumulative evaluation requires t in [0, {T}]")
    out = _kernels.active().cumulative_eval(hazard.knots, hazard.rates, ts)
    return float(out[0]) if scalar else out


def invert_cumulative(hazard: CumulativeHazard, z):
    """Time t with cumulative mass exactly z, for z in [0, total]."""
    scalar = np.isscalar(z)
    zs = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if np.any(zs < 0.0) or np.any(zs > hazard.total):
        raise DomainError(f"inversion requires z in [0, {hazard.total}]")
    out = _kernels.active().cumulative_invert(hazard.knots, hazard.rates, zs)
    return float(out[0]) if scalar else out
