"""Shared test utilities: independent oracles and random-case builders.

The finite-difference gradient and the direct-formula loss evaluators
here deliberately avoid the library's stable formulations so they stay
independent of the code under test.
"""

import math

import numpy as np

from framepoint import EventLabels, FrameGrid, FrameScores


def finite_difference_gradient(fn, x, step=1e-5):
    """Central finite differences of a scalar function of a vector."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for k in range(x.size):
        up = x.copy()
        down = x.copy()
        up[k] += step
        down[k] -= step
        grad[k] = (fn(up) - fn(down)) / (2.0 * step)
    return grad


def relative_error(actual, expected):
    """Error scaled by max(1, ||expected||): behaves like a relative error
    for O(1)-or-larger gradients and like an absolute error near zero,
    where central differences only carry ~1e-11 of cancellation noise."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    denom = max(float(np.linalg.norm(expected)), 1.0)
    return float(np.linalg.norm(actual - expected)) / denom


def direct_binary_value(logits, marks, weight):
    """Textbook weighted cross-entropy, no numerical safeguards."""
    total = 0.0
    for s, y in zip(logits, marks):
        p = 1.0 / (1.0 + math.exp(-s))
        total += -(weight * y * math.log(p) + (1 - y) * math.log(1.0 - p))
    return total


def direct_poisson_value(scores, times_frames):
    """Direct evaluation of the conditional likelihood definition."""
    scores = np.asarray(scores, dtype=np.float64)
    T = scores.size
    rates = np.exp(scores)
    total = float(np.sum(rates))
    value = len(times_frames) * math.log(total)
    for t in times_frames:
        value -= float(scores[min(int(t), T - 1)])
    return value


def random_rates(rng, T):
    """Moderate strictly-positive rates."""
    return np.exp(rng.normal(0.0, 1.0, size=T))


def make_scores(values, frame_duration_s=0.04):
    values = np.asarray(values, dtype=np.float64)
    return FrameScores(values=values,
                       grid=FrameGrid(values.size, frame_duration_s))


def make_labels(times_frames, num_frames, frame_duration_s=0.04):
    return EventLabels.from_frames(times_frames,
                                   FrameGrid(num_frames, frame_duration_s))
