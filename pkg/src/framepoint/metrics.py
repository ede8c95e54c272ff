"""Timestamp evaluation: tolerance accuracy and mean absolute deviation,
with optional stratification.

Predictions and ground truth are matched index-wise after sorting both
lists within each example (the i-th predicted against the i-th true
timestamp), so the counts must agree per example. All arithmetic is in
seconds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError

#: transcript-length strata: (low, high) inclusive; None = unbounded
COUNT_BUCKETS = ((1, 5), (6, 10), (11, 15), (16, 20), (21, 25), (26, None))

BUCKET_RULES = ("event_count", "time_range")


@dataclass(frozen=True)
class MetricReport:
    accuracy_by_tolerance: dict
    mad_s: float
    n_events: int
    strata: dict | None = None

    def as_dict(self) -> dict:
        doc = {
            "accuracy_by_tolerance": {f"{tol:g}": acc for tol, acc
                                      in self.accuracy_by_tolerance.items()},
            "mad_s": self.mad_s,
            "n_events": self.n_events,
        }
        if self.strata is not None:
            doc["strata"] = {name: rep.as_dict()
                             for name, rep in self.strata.items()}
        return doc


def _times_s(example) -> np.ndarray:
    """Seconds from a list of floats, predictions, or an EventLabels."""
    if hasattr(example, "times_s"):
        return np.sort(np.asarray(example.times_s, dtype=np.float64))
    if len(example) and hasattr(example[0], "time_s"):
        return np.sort(np.asarray([p.time_s for p in example], dtype=np.float64))
    return np.sort(np.asarray(example, dtype=np.float64))


def _paired_errors(preds, truths, ids=None):
    """Per-pair |pred - truth| in seconds, plus per-pair truth times and
    per-pair example index."""
    if len(preds) != len(truths):
        raise EvaluationError(f"{len(preds)} prediction lists vs "
                              f"{len(truths)} truth lists")
    errors, truth_times, owners = [], [], []
    for i, (p, t) in enumerate(zip(preds, truths)):
        ps, ts = _times_s(p), _times_s(t)
        if ps.shape != ts.shape:
            name = ids[i] if ids is not None else f"example {i}"
            raise EvaluationError(f"{name}: {ps.size} predictions vs "
                                  f"{ts.size} ground-truth events")
        errors.append(np.abs(ps - ts))
        truth_times.append(ts)
        owners.append(np.full(ts.size, i, dtype=np.int64))
    cat = (lambda parts: np.concatenate(parts) if parts
           else np.empty(0, dtype=np.float64))
    return cat(errors), cat(truth_times), cat(owners)


def _report_from_errors(errors: np.ndarray, tolerances_s) -> MetricReport:
    n = int(errors.size)
    acc = {float(tol): (float(np.mean(errors <= tol)) if n else 0.0)
           for tol in tolerances_s}
    mad = float(np.mean(errors)) if n else 0.0
    return MetricReport(accuracy_by_tolerance=acc, mad_s=mad, n_events=n)


def score(preds, truths, tolerances_s, ids=None) -> MetricReport:
    """Pooled accuracy at each tolerance plus MAD over all matched pairs."""
    errors, _, _ = _paired_errors(preds, truths, ids)
    return _report_from_errors(errors, tolerances_s)


def _count_bucket_label(n: int) -> str | None:
    for lo, hi in COUNT_BUCKETS:
        if n >= lo and (hi is None or n <= hi):
            return f"{lo}-{hi}" if hi is not None else f"{lo}+"
    return None


def _time_bucket_label(t: float, edges) -> str:
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo <= t < hi:
            return f"{lo:g}-{hi:g}s"
    if t < edges[0]:
        return f"<{edges[0]:g}s"
    return f"{edges[-1]:g}+s"


def stratify(preds, truths, tolerances_s, rule: str = "event_count",
             edges=None, ids=None) -> MetricReport:
    """Pooled report plus one sub-report per bucket.

    ``event_count`` buckets whole examples by their ground-truth event
    count (transcript-length analogue); ``time_range`` buckets individual
    pairs by the ground-truth time against ``edges`` (seconds, ascending).
    """
    if rule not in BUCKET_RULES:
        raise EvaluationError(f"unknown bucket rule {rule!r}; "
                              f"expected one of {BUCKET_RULES}")
    errors, truth_times, owners = _paired_errors(preds, truths, ids)
    if rule == "event_count":
        counts = {i: int(np.sum(owners == i)) for i in range(len(truths))}
        labels = np.array([_count_bucket_label(counts[i]) or "0"
                           for i in owners])
        ordered = [f"{lo}-{hi}" if hi is not None else f"{lo}+"
                   for lo, hi in COUNT_BUCKETS]
    else:
        if edges is None or len(edges) < 2:
            raise EvaluationError("time_range stratification needs at least "
                                  "two bucket edges (seconds)")
        edges = [float(e) for e in edges]
        if any(a >= b for a, b in zip(edges[:-1], edges[1:])):
            raise EvaluationError("bucket edges must be strictly increasing")
        labels = np.array([_time_bucket_label(t, edges) for t in truth_times])
        ordered = ([f"<{edges[0]:g}s"]
                   + [f"{lo:g}-{hi:g}s" for lo, hi in zip(edges[:-1], edges[1:])]
                   + [f"{edges[-1]:g}+s"])
    strata = {}
    for name in ordered:
        mask = labels == name
        if np.any(mask):
            strata[name] = _report_from_errors(errors[mask], tolerances_s)
    pooled = _report_from_errors(errors, tolerances_s)
    return MetricReport(accuracy_by_tolerance=pooled.accuracy_by_tolerance,
                        mad_s=pooled.mad_s, n_events=pooled.n_events,
                        strata=strata)


def render_table(report: MetricReport) -> str:
    """Aligned plain-text table, pooled row first, then any strata."""
    tols = sorted(report.accuracy_by_tolerance)
    header = ["stratum", "n_events"] + [f"acc@{tol:g}s" for tol in tols] + ["mad_s"]
    rows = [_row("all", report, tols)]
    for name, sub in (report.strata or {}).items():
        rows.append(_row(name, sub, tols))
    widths = [max(len(header[c]), *(len(r[c]) for r in rows))
              for c in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join([fmt.format(*header)] + [fmt.format(*r) for r in rows])


def render_csv(report: MetricReport) -> str:
    tols = sorted(report.accuracy_by_tolerance)
    lines = [",".join(["stratum", "n_events"]
                      + [f"acc@{tol:g}s" for tol in tols] + ["mad_s"])]
    lines.append(",".join(_row("all", report, tols)))
    for name, sub in (report.strata or {}).items():
        lines.append(",".join(_row(name, sub, tols)))
    return "\n".join(lines) + "\n"


def _row(name: str, report: MetricReport, tols) -> list[str]:
    return ([name, str(report.n_events)]
            + [f"{report.accuracy_by_tolerance[tol]:.4f}" for tol in tols]
            + [f"{report.mad_s:.6f}"])
