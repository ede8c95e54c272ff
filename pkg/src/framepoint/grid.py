"""Frame/time conventions: the frame grid and event label containers.

Time inside the math is measured in frame units on the domain [0, T];
seconds appear only at I/O boundaries. Frame k (0-based) covers the
half-open interval [k, k+1), so an event landing exactly on a frame
boundary belongs to the following frame; an event at exactly t = T is
clamped into the last frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError

#: relative slack applied when validating frame-unit times, to absorb
#: one-ulp overshoot from seconds -> frames division
_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class FrameGrid:
    """A fixed grid of ``num_frames`` frames of ``frame_duration_s`` seconds."""

    num_frames: int
    frame_duration_s: float = 0.04

    def __post_init__(self):
        if not isinstance(self.num_frames, (int, np.integer)) or self.num_frames < 1:
            raise DomainError(f"num_frames must be a positive integer, got "
                              f"{self.num_frames!r}")
        if not (self.frame_duration_s > 0):
            raise DomainError(f"frame_duration_s must be positive, got "
                              f"{self.frame_duration_s!r}")
        object.__setattr__(self, "num_frames", int(self.num_frames))
        object.__setattr__(self, "frame_duration_s", float(self.frame_duration_s))

    @property
    def duration_s(self) -> float:
        return self.num_frames * self.frame_duration_s

    def to_seconds(self, t_frames):
        """Convert frame-unit times to seconds."""
        if np.isscalar(t_frames):
            return float(t_frames) * self.frame_duration_s
        return np.asarray(t_frames, dtype=np.float64) * self.frame_duration_s

    def to_frames(self, t_seconds):
        """Convert seconds to frame-unit times."""
        if np.isscalar(t_seconds):
            return float(t_seconds) / self.frame_duration_s
        return np.asarray(t_seconds, dtype=np.float64) / self.frame_duration_s

    def frame_of(self, t_frames: float) -> int:
        """Index of the frame containing a frame-unit time in [0, T]."""
        T = self.num_frames
        if not (0.0 <= t_frames <= T):
            raise DomainError(f"time {t_frames!r} outside [0, {T}]")
        return min(int(np.floor(t_frames)), T - 1)


def frames_to_seconds(grid: FrameGrid, t_frames):
    return grid.to_seconds(t_frames)


def _check_times(times: np.ndarray, grid: FrameGrid) -> np.ndarray:
    T = grid.num_frames
    if times.ndim != 1:
        raise ShapeError(f"event times must be one-dimensional, got shape "
                         f"{times.shape}")
    if not np.all(np.isfinite(times)):
        raise DomainError("event times must be finite")
    slack = _EDGE_TOL * max(1.0, T)
    if np.any(times < -slack) or np.any(times > T + slack):
        raise DomainError(f"event times must lie in [0, {T}] frames")
    return np.clip(times, 0.0, float(T))


@dataclass(frozen=True)
class EventLabels:
    """Ground-truth event times plus the derived per-frame binary marks.

    A frame is marked 1 iff at least one event time falls inside it.
    ``times_frames`` and ``times_s`` are kept in sync; whichever the
    instance was built from is stored verbatim and the other derived.
    """

    times_frames: np.ndarray
    times_s: np.ndarray
    grid: FrameGrid
    marks: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        tf = np.sort(np.asarray(self.times_frames, dtype=np.float64))
        ts = np.sort(np.asarray(self.times_s, dtype=np.float64))
        tf = _check_times(tf, self.grid)
        if ts.shape != tf.shape:
            raise ShapeError("times_frames and times_s lengths differ")
        object.__setattr__(self, "times_frames", tf)
        object.__setattr__(self, "times_s", ts)
        T = self.grid.num_frames
        marks = np.zeros(T, dtype=np.uint8)
        if tf.size:
            marks[self.frame_indices()] = 1
        object.__setattr__(self, "marks", marks)

    @classmethod
    def from_frames(cls, times_frames, grid: FrameGrid) -> "EventLabels":
        tf = np.sort(np.asarray(times_frames, dtype=np.float64))
        return cls(times_frames=tf, times_s=grid.to_seconds(tf), grid=grid)

    @classmethod
    def from_seconds(cls, times_s, grid: FrameGrid) -> "EventLabels":
        ts = np.sort(np.asarray(times_s, dtype=np.float64))
        return cls(times_frames=grid.to_frames(ts), times_s=ts, grid=grid)

    @property
    def count(self) -> int:
        return int(self.times_frames.size)

    def frame_indices(self) -> np.ndarray:
        """Frame index containing each event, with t = T clamped inside."""
        T = self.grid.num_frames
        idx = np.floor(self.times_frames).astype(np.int64)
        return np.clip(idx, 0, T - 1)

    def multiplicities(self) -> np.ndarray:
        """Number of events per frame (length T, sums to count)."""
        return np.bincount(self.frame_indices(),
                           minlength=self.grid.num_frames).astype(np.int64)
