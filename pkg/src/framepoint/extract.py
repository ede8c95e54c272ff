"""Timestamp extraction from trained frame scores, plus verification
machinery.

The binary head reports the top-k scoring frames at their midpoints. The
point-process head extracts, for each event index i of n, the exact mode
of the conditional density of the i-th arrival time,

    density(t)  proportional to  M(t)^(i-1) * (M(T) - M(t))^(n-i) * rate(t)

where M is the cumulative mass of the intensity. Because the intensity is
constant within each frame, the density restricted to a frame is either
monotone in t or has a single interior peak where M(t) equals
M(T) * (i-1)/(n-1); the global mode is therefore found exactly by scoring
the frame edges plus that interior candidate.

Two independent verifiers live here as well: a dense-grid argmax oracle
and a thinning sampler for the underlying point process.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .grid import FrameGrid
from .hazard import (CumulativeHazard, IntensityProfile, build_cumulative,
                     eval_cumulative)
from .losses import FrameScores


@dataclass(frozen=True)
class TimestampPrediction:
    """One extracted timestamp (1-based event index, frame-unit and
    second times, containing frame)."""

    event_index: int
    time_frames: float
    time_s: float
    frame_index: int


@dataclass(frozen=True)
class PosteriorDensity:
    """The conditional density of the i-th of n arrival times under a
    fixed intensity profile."""

    profile: IntensityProfile
    hazard: CumulativeHazard
    n: int
    i: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"event count must be positive, got {self.n}")
        if not (1 <= self.i <= self.n):
            raise DomainError(f"event index {self.i} outside [1, {self.n}]")

    @classmethod
    def build(cls, profile: IntensityProfile, n: int, i: int) -> "PosteriorDensity":
        return cls(profile=profile, hazard=build_cumulative(profile), n=n, i=i)


def _midpoint_prediction(event_index: int, frame: int, grid: FrameGrid) -> TimestampPrediction:
    t = frame + 0.5
    return TimestampPrediction(event_index=event_index, time_frames=t,
                               time_s=grid.to_seconds(t), frame_index=frame)


def binary_extract(scores: FrameScores, k: int) -> list[TimestampPrediction]:
    """Midpoints of the k highest-scoring frames, in time order.

    Ties go to the lower frame index.
    """
    T = scores.grid.num_frames
    if not (1 <= k <= T):
        raise DomainError(f"k must lie in [1, {T}], got {k}")
    ranked = np.argsort(-scores.values, kind="stable")[:k]
    chosen = np.sort(ranked)
    return [_midpoint_prediction(rank + 1, int(j), scores.grid)
            for rank, j in enumerate(chosen)]


def posterior_log_density(density: PosteriorDensity, t):
    """Unnormalized log density at frame-unit times t in [0, T].

    Boundary conventions: a zero exponent suppresses its factor
    (0 * log 0 := 0); where a positive exponent meets a zero argument the
    value is -inf. At interior frame edges the rate of the containing
    (right) frame is used; at t = T, the last frame's.
    """
    scalar = np.isscalar(t)
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    profile, hazard, n, i = (density.profile, density.hazard,
                             density.n, density.i)
    T = profile.grid.num_frames
    if np.any(ts < 0.0) or np.any(ts > T):
        raise DomainError(f"density evaluation requires t in [0, {T}]")
    mass = eval_cumulative(hazard, ts)
    frames = np.clip(np.floor(ts).astype(np.int64), 0, T - 1)
    out = np.log(profile.rates[frames])
    if i > 1:
        with np.errstate(divide="ignore"):
            out = np.where(mass > 0.0,
                           out + (i - 1) * np.log(np.maximum(mass, 1e-300)),
                           -np.inf)
    if i < n:
        resid = hazard.total - mass
        with np.errstate(divide="ignore"):
            out = np.where(resid > 0.0,
                           out + (n - i) * np.log(np.maximum(resid, 1e-300)),
                           -np.inf)
    return float(out[0]) if scalar else out


def posterior_mode(density: PosteriorDensity) -> TimestampPrediction:
    """Exact argmax of the conditional density over [0, T].

    Candidates per frame are its two edge times plus, for 1 < i < n, the
    interior time where the cumulative mass hits total * (i-1)/(n-1) when
    that lies inside the frame. Value ties resolve to the earliest time.
    For n = 1 the density is flat within each frame, so the midpoint of
    the highest-rate frame is reported (lowest index on ties), matching
    the binary head's midpoint convention.
    """
    profile, hazard = density.profile, density.hazard
    t = _kernels.active().mode_search(profile.rates, hazard.knots,
                                      density.n, density.i)
    grid = profile.grid
    return TimestampPrediction(event_index=density.i, time_frames=float(t),
                               time_s=grid.to_seconds(float(t)),
                               frame_index=grid.frame_of(float(t)))


def posterior_modes_all(profile: IntensityProfile, n: int) -> list[TimestampPrediction]:
    """Per-index modes for i = 1..n (nondecreasing in time in practice)."""
    if n < 1:
        raise DomainError(f"event count must be positive, got {n}")
    hazard = build_cumulative(profile)
    return [posterior_mode(PosteriorDensity(profile=profile, hazard=hazard,
                                            n=n, i=i))
            for i in range(1, n + 1)]


def grid_oracle_mode(density: PosteriorDensity, step: float = 1e-3) -> TimestampPrediction:
    """Brute-force argmax of the log density over a dense grid plus all
    frame-edge times. Independent check for posterior_mode; keeps no
    knowledge of the candidate construction."""
    if not (0 < step <= 0.01):
        raise DomainError(f"oracle step must lie in (0, 0.01], got {step}")
    T = density.profile.grid.num_frames
    ts = np.unique(np.concatenate([
        np.arange(step, T, step, dtype=np.float64),
        np.arange(0, T + 1, dtype=np.float64),
    ]))
    vals = posterior_log_density(density, ts)
    best = float(ts[int(np.argmax(vals))])  # first max -> earliest time
    grid = density.profile.grid
    return TimestampPrediction(event_index=density.i, time_frames=best,
                               time_s=grid.to_seconds(best),
                               frame_index=grid.frame_of(best))


def sample_ihp(profile: IntensityProfile, seed: int) -> np.ndarray:
    """One realization of the point process on [0, T] by thinning a
    homogeneous process of rate max(rates). Deterministic given seed."""
    rng = np.random.default_rng(seed)
    T = profile.grid.num_frames
    lam_max = float(np.max(profile.rates))
    count = rng.poisson(lam_max * T)
    candidates = np.sort(rng.uniform(0.0, T, size=count))
    keep = rng.uniform(size=count) * lam_max
    frames = np.minimum(np.floor(candidates).astype(np.int64), T - 1)
    return candidates[keep < profile.rates[frames]]
