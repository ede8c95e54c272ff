"""Training objectives over per-frame scores, with analytic gradients.

Two objectives are provided. The binary path reads the scores as logits
of independent per-frame event probabilities and reweights the sparse
positive class. The point-process path reads the scores as log rates of
a piecewise-constant intensity and maximizes the likelihood of the event
times conditioned on their count:

    value = -sum_j log rate(t_j) + n * log(total mass)

which is invariant under adding a constant to every score. Gradients are
with respect to the raw scores in both cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .errors import ConfigError, DomainError, ShapeError
from .grid import EventLabels, FrameGrid

#: sentinel for per-example negative/positive reweighting
AUTO_WEIGHT = "auto"

WeightSpec = Union[str, float]


@dataclass(frozen=True)
class FrameScores:
    """Raw per-frame scores: logits for the binary objective, log rates
    for the point-process objective."""

    values: np.ndarray
    grid: FrameGrid

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ShapeError(f"scores must be one-dimensional, got shape "
                             f"{values.shape}")
        if values.shape[0] != self.grid.num_frames:
            raise ShapeError(f"{values.shape[0]} scores for a grid of "
                             f"{self.grid.num_frames} frames")
        if not np.all(np.isfinite(values)):
            raise DomainError("scores must be finite")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class LossResult:
    """Loss value in nats plus its gradient w.r.t. the per-frame scores."""

    value: float
    gradient: np.ndarray

    def __post_init__(self):
        grad = np.ascontiguousarray(self.gradient, dtype=np.float64)
        if not np.isfinite(self.value) or not np.all(np.isfinite(grad)):
            raise DomainError("loss value and gradient must be finite")
        object.__setattr__(self, "gradient", grad)


def resolve_class_weight(marks: np.ndarray, weight: WeightSpec) -> float:
    """Fixed positive weight, or negatives/positives for ``"auto"``."""
    if weight == AUTO_WEIGHT:
        positives = int(np.sum(marks != 0))
        negatives = int(marks.size) - positives
        if positives == 0 or negatives == 0:
            raise ConfigError(
                "auto class weight needs at least one positive and one "
                f"negative frame; got {positives} positives of {marks.size}")
        return negatives / positives
    w = float(weight)
    if not (w > 0) or not np.isfinite(w):
        raise ConfigError(f"class weight must be positive, got {weight!r}")
    return w


def binary_loss_from_marks(scores: FrameScores, marks: np.ndarray,
                           weight: WeightSpec = AUTO_WEIGHT) -> LossResult:
    """Class-weighted binary cross-entropy against raw per-frame marks."""
    marks = np.ascontiguousarray(marks, dtype=np.float64)
    if marks.shape != scores.values.shape:
        raise ShapeError(f"marks shape {marks.shape} does not match "
                         f"{scores.values.shape} scores")
    if np.any((marks != 0.0) & (marks != 1.0)):
        raise DomainError("marks must be binary")
    w = resolve_class_weight(marks, weight)
    value, grad = _kernels.active().binary_loss(scores.values, marks, w)
    return LossResult(value=value, gradient=grad)


def binary_loss(scores: FrameScores, labels: EventLabels,
                weight: WeightSpec = AUTO_WEIGHT) -> LossResult:
    _check_grids(scores.grid, labels.grid)
    return binary_loss_from_marks(scores, labels.marks, weight)


def poisson_nll(scores: FrameScores, labels: EventLabels) -> LossResult:
    """Conditional negative log-likelihood of the labelled event times."""
    _check_grids(scores.grid, labels.grid)
    n = labels.count
    if n < 1:
        raise DomainError("the conditional likelihood needs at least one "
                          "event; got an empty label set")
    mult = labels.multiplicities().astype(np.float64)
    value, grad = _kernels.active().poisson_nll(scores.values, mult, n)
    return LossResult(value=value, gradient=grad)


def poisson_nll_from_times(scores: FrameScores, times_frames) -> LossResult:
    labels = EventLabels.from_frames(times_frames, scores.grid)
    return poisson_nll(scores, labels)


def interpolated_loss(primary: LossResult, auxiliary: LossResult,
                      coefficient: float) -> LossResult:
    """primary + coefficient * auxiliary, value and gradient alike."""
    if not (coefficient >= 0):
        raise DomainError(f"coefficient must be nonnegative, got "
                          f"{coefficient!r}")
    if primary.gradient.shape != auxiliary.gradient.shape:
        raise ShapeError(f"gradient lengths differ: "
                         f"{primary.gradient.shape[0]} vs "
                         f"{auxiliary.gradient.shape[0]}")
    return LossResult(
        value=primary.value + coefficient * auxiliary.value,
        gradient=primary.gradient + coefficient * auxiliary.gradient)


def _check_grids(a: FrameGrid, b: FrameGrid) -> None:
    if a.num_frames != b.num_frames or a.frame_duration_s != b.frame_duration_s:
        raise ShapeError(f"mismatched grids: {a} vs {b}")
