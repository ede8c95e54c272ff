"""Pure-numpy kernel backend.

Reference semantics for the hot numerical routines. The compiled Cython
backend (``_core``) implements the same contracts; both are exercised by
the backend-parity tests. Inputs arrive validated — callers in the public
modules own the error checking.
"""

from __future__ import annotations

import numpy as np

LOG_RATE_CLAMP = 30.0


def backend_name() -> str:
    return "python"


def binary_loss(scores: np.ndarray, marks: np.ndarray, weight: float):
    """Weighted per-frame cross-entropy against sigmoid(scores).

    Returns ``(value, gradient)`` where the gradient is taken with respect
    to the raw scores. Uses the log1p-stable softplus form, so saturated
    scores cannot produce NaN or inf.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(marks, dtype=np.float64)
    # softplus(x) = log(1 + e^x), computed stably for either sign
    sp_neg = np.logaddexp(0.0, -s)   # -log sigmoid(s)
    sp_pos = np.logaddexp(0.0, s)    # -log(1 - sigmoid(s))
    value = float(np.sum(weight * y * sp_neg + (1.0 - y) * sp_pos))
    p = np.empty_like(s)
    pos = s >= 0
    p[pos] = 1.0 / (1.0 + np.exp(-s[pos]))
    e = np.exp(s[~pos])
    p[~pos] = e / (1.0 + e)
    grad = weight * y * (p - 1.0) + (1.0 - y) * p
    return value, grad


def poisson_nll(scores: np.ndarray, multiplicities: np.ndarray, n: int):
    """Negative log-likelihood of event counts per frame under rates
    exp(scores), conditioned on the total count ``n``.

    ``multiplicities[k]`` is the number of events in frame k
    (sum equals ``n``). Scores are clamped to +/-LOG_RATE_CLAMP before
    exponentiation; the total mass is a direct summation of the rates.
    """
    s = np.clip(np.asarray(scores, dtype=np.float64),
                -LOG_RATE_CLAMP, LOG_RATE_CLAMP)
    m = np.asarray(multiplicities, dtype=np.float64)
    lam = np.exp(s)
    total = float(np.sum(lam))
    value = float(-np.sum(m * s) + n * np.log(total))
    grad = -m + n * lam / total
    return value, grad


def cumulative_eval(knots: np.ndarray, rates: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolation of the prefix-sum knots at times ts."""
    ts = np.asarray(ts, dtype=np.float64)
    T = rates.shape[0]
    j = np.clip(np.floor(ts).astype(np.int64), 0, T - 1)
    return knots[j] + (ts - j) * rates[j]


def cumulative_invert(knots: np.ndarray, rates: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Inverse of cumulative_eval; exact at the knots."""
    zs = np.asarray(zs, dtype=np.float64)
    T = rates.shape[0]
    j = np.clip(np.searchsorted(knots, zs, side="right") - 1, 0, T - 1)
    ts = j + (zs - knots[j]) / rates[j]
    return np.where(zs == knots[T], float(T), ts)


def _beta_part(lam_total: float, L: np.ndarray, n: int, i: int) -> np.ndarray:
    """Order-statistic factor of the i-th-of-n arrival-time log density at
    cumulative mass L. Zero exponents suppress their term (0 * log 0 := 0);
    a positive exponent meeting a nonpositive argument gives -inf."""
    out = np.zeros_like(L)
    if i > 1:
        out = np.where(L > 0.0, (i - 1) * np.log(np.maximum(L, 1e-300)),
                       -np.inf)
    if i < n:
        resid = lam_total - L
        out = np.where(resid > 0.0,
                       out + (n - i) * np.log(np.maximum(resid, 1e-300)),
                       -np.inf)
    return out


def mode_search(rates: np.ndarray, knots: np.ndarray, n: int, i: int) -> float:
    """Argmax over [0, T] of the i-th arrival-time log density.

    Candidates per frame: both knot times plus, for 1 < i < n, the interior
    point where the cumulative mass hits total * (i-1)/(n-1) if that mass
    falls inside the frame. The order-statistic factor is evaluated once
    per knot and shared by the two frames meeting there. Ties in value
    resolve to the earliest time. For n == 1 the density is flat within
    each frame, so the midpoint of the highest-rate frame (lowest index
    on ties) is returned.
    """
    T = rates.shape[0]
    if n == 1:
        return float(np.argmax(rates)) + 0.5
    total = float(knots[T])
    log_rate = np.log(rates)
    knot_beta = _beta_part(total, knots, n, i)
    times = [np.arange(T, dtype=np.float64),
             np.arange(1, T + 1, dtype=np.float64)]
    vals = [knot_beta[:-1] + log_rate, knot_beta[1:] + log_rate]
    if 1 < i < n:
        target = total * (i - 1) / (n - 1)
        left_k = knots[:-1]
        inside = (left_k <= target) & (target <= knots[1:])
        if np.any(inside):
            idx = np.nonzero(inside)[0]
            t_star = idx + (target - left_k[idx]) / rates[idx]
            times.append(t_star.astype(np.float64))
            vals.append(_beta_part(total, np.full(idx.shape, target), n, i)
                        + log_rate[idx])
    times_all = np.concatenate(times)
    vals_all = np.concatenate(vals)
    order = np.argsort(times_all, kind="stable")
    best = int(np.argmax(vals_all[order]))  # first max -> earliest time
    return float(times_all[order][best])
