"""Synthetic temporal-grounding data.

Each example carries per-frame feature vectors standing in for the
query-conditioned decoder states of an audio LM: pure Gaussian noise
except near events of the queried type, where the type's signature
vector is added at full strength on the event frame and at reduced
strength one frame to either side (fuzzy annotation analogue). Events of
other types leave no trace, emulating prompt conditioning upstream.
Labels contain only the queried-type events.

JSONL record schema (one example per line):
    {"id": str, "frame_ms": 40.0, "num_frames": int, "feature_dim": int,
     "features": [[...], ...], "query": int, "event_times_s": [...],
     "split": "train|dev|test"}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (ConfigError, DatasetFormatError, DomainError,
                     GenerationError, ShapeError)
from .grid import EventLabels, FrameGrid

#: signature strength on the two frames adjacent to an event frame,
#: relative to the event frame itself. Kept below 0.5 so that two events
#: at the minimum separation cannot tie a non-event frame with a center.
NEIGHBOR_TAPER = 0.4

SPLITS = ("train", "dev", "test")

IntOrRange = Union[int, tuple]

_REQUIRED_FIELDS = ("id", "frame_ms", "num_frames", "feature_dim",
                    "features", "query", "event_times_s", "split")


@dataclass(frozen=True)
class FrameFeatures:
    """Per-frame feature vectors (T x feature_dim) for one example."""

    vectors: np.ndarray
    grid: FrameGrid
    query_id: int

    def __post_init__(self):
        vectors = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise ShapeError(f"features must be 2-D, got shape {vectors.shape}")
        if vectors.shape[0] != self.grid.num_frames:
            raise ShapeError(f"{vectors.shape[0]} feature rows for a grid of "
                             f"{self.grid.num_frames} frames")
        if not np.all(np.isfinite(vectors)):
            raise DomainError("features must be finite")
        object.__setattr__(self, "vectors", vectors)

    @property
    def feature_dim(self) -> int:
        return int(self.vectors.shape[1])


@dataclass(frozen=True)
class GenConfig:
    num_examples: int
    duration_frames: IntOrRange = 200
    feature_dim: int = 16
    num_event_types: int = 8
    events_per_example: IntOrRange = 1
    signal_amplitude: float = 1.0
    noise_sigma: float = 0.1
    event_time_range_frames: tuple | None = None
    seed: int = 0
    frame_duration_s: float = 0.04
    min_separation_frames: float = 2.0
    enforce_separation: bool = True

    def __post_init__(self):
        if self.num_examples < 1:
            raise ConfigError("num_examples must be positive")
        if self.feature_dim < 1 or self.num_event_types < 1:
            raise ConfigError("feature_dim and num_event_types must be positive")
        if not (self.signal_amplitude > 0):
            raise ConfigError("signal_amplitude must be positive")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be nonnegative")
        lo_d, _ = _range_bounds(self.duration_frames)
        lo_n, _ = _range_bounds(self.events_per_example)
        if lo_d < 1:
            raise ConfigError("duration_frames must be >= 1")
        if lo_n < 1:
            raise ConfigError("events_per_example must be >= 1")
        if self.event_time_range_frames is not None:
            lo, hi = self.event_time_range_frames
            if not (0 <= lo < hi <= lo_d):
                raise ConfigError(
                    f"event_time_range_frames [{lo}, {hi}] must satisfy "
                    f"0 <= lo < hi <= duration ({lo_d})")


def _range_bounds(value: IntOrRange) -> tuple[int, int]:
    if isinstance(value, (int, np.integer)):
        return int(value), int(value)
    lo, hi = value
    if lo > hi:
        raise ConfigError(f"empty range [{lo}, {hi}]")
    return int(lo), int(hi)


@dataclass
class TrainingSet:
    """Examples plus aligned split tags and stable ids."""

    examples: list  # of (FrameFeatures, EventLabels)
    splits: list[str]
    ids: list[str]

    def __post_init__(self):
        if not (len(self.examples) == len(self.splits) == len(self.ids)):
            raise ShapeError("examples, splits and ids must be aligned")
        for split in self.splits:
            if split not in SPLITS:
                raise DatasetFormatError(f"unknown split tag {split!r}")
        dims = {f.feature_dim for f, _ in self.examples}
        durs = {f.grid.frame_duration_s for f, _ in self.examples}
        if len(dims) > 1:
            raise ShapeError(f"inconsistent feature dims across examples: {dims}")
        if len(durs) > 1:
            raise ShapeError(f"inconsistent frame durations across examples: {durs}")

    def __len__(self) -> int:
        return len(self.examples)

    @property
    def feature_dim(self) -> int:
        return self.examples[0][0].feature_dim

    def subset(self, split: str) -> "TrainingSet":
        idx = [i for i, s in enumerate(self.splits) if s == split]
        return TrainingSet(examples=[self.examples[i] for i in idx],
                           splits=[self.splits[i] for i in idx],
                           ids=[self.ids[i] for i in idx])


def type_signatures(seed: int, num_event_types: int, feature_dim: int) -> np.ndarray:
    """Unit-norm signature vector per event type, fixed by the dataset seed."""
    rng = np.random.default_rng([seed, 0x51D])
    sig = rng.normal(size=(num_event_types, feature_dim))
    return sig / np.linalg.norm(sig, axis=1, keepdims=True)


def _sample_times(rng, n: int, lo: float, hi: float, min_sep: float,
                  enforce: bool) -> np.ndarray:
    if not enforce or n == 1:
        return np.sort(rng.uniform(lo, hi, size=n))
    if (hi - lo) <= (n - 1) * min_sep:
        raise GenerationError(
            f"range [{lo}, {hi}] too narrow for {n} events separated by "
            f">= {min_sep} frames")
    for _ in range(200):
        times = np.sort(rng.uniform(lo, hi, size=n))
        if np.min(np.diff(times)) >= min_sep:
            return times
    raise GenerationError(
        f"could not place {n} events in [{lo}, {hi}] with separation "
        f">= {min_sep} after 200 attempts")


def _assign_splits(num: int) -> list[str]:
    if num < 3:
        return ["train"] * num
    if num < 10:
        return ["train"] * (num - 2) + ["dev", "test"]
    n_dev = num // 10
    n_test = num // 10
    n_train = num - n_dev - n_test
    return ["train"] * n_train + ["dev"] * n_dev + ["test"] * n_test


def generate(config: GenConfig) -> TrainingSet:
    """Deterministic synthetic dataset; per-example RNG streams derive
    from (seed, example index) so generation order never matters."""
    signatures = type_signatures(config.seed, config.num_event_types,
                                 config.feature_dim)
    dur_lo, dur_hi = _range_bounds(config.duration_frames)
    ev_lo, ev_hi = _range_bounds(config.events_per_example)
    examples = []
    ids = []
    for idx in range(config.num_examples):
        rng = np.random.default_rng([config.seed, 1, idx])
        T = int(rng.integers(dur_lo, dur_hi + 1))
        grid = FrameGrid(num_frames=T, frame_duration_s=config.frame_duration_s)
        n = int(rng.integers(ev_lo, ev_hi + 1))
        lo, hi = (config.event_time_range_frames
                  if config.event_time_range_frames is not None else (0.0, T))
        times = _sample_times(rng, n, float(lo), float(hi),
                              config.min_separation_frames,
                              config.enforce_separation)
        types = rng.integers(0, config.num_event_types, size=n)
        query = int(rng.choice(np.unique(types)))
        queried = times[types == query]

        vectors = config.noise_sigma * rng.standard_normal((T, config.feature_dim))
        for t in queried:
            center = grid.frame_of(float(t))
            for offset, strength in ((-1, NEIGHBOR_TAPER), (0, 1.0),
                                     (1, NEIGHBOR_TAPER)):
                frame = center + offset
                if 0 <= frame < T:
                    vectors[frame] += (config.signal_amplitude * strength
                                       * signatures[query])

        features = FrameFeatures(vectors=vectors, grid=grid, query_id=query)
        labels = EventLabels.from_frames(queried, grid)
        examples.append((features, labels))
        ids.append(f"ex{idx:05d}")
    return TrainingSet(examples=examples, splits=_assign_splits(len(examples)),
                       ids=ids)


def write_dataset(path, dataset: TrainingSet) -> None:
    lines = []
    for (features, labels), split, ex_id in zip(dataset.examples,
                                                dataset.splits, dataset.ids):
        record = {
            "id": ex_id,
            "frame_ms": features.grid.frame_duration_s * 1000.0,
            "num_frames": features.grid.num_frames,
            "feature_dim": features.feature_dim,
            "features": features.vectors.tolist(),
            "query": features.query_id,
            "event_times_s": labels.times_s.tolist(),
            "split": split,
        }
        lines.append(json.dumps(record))
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset(path) -> TrainingSet:
    examples = []
    splits = []
    ids = []
    frame_ms = None
    with open(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(
                    f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            for name in _REQUIRED_FIELDS:
                if name not in record:
                    raise DatasetFormatError(
                        f"{path}:{lineno}: missing field {name!r}")
            if frame_ms is None:
                frame_ms = record["frame_ms"]
            elif record["frame_ms"] != frame_ms:
                raise DatasetFormatError(
                    f"{path}:{lineno}: frame_ms {record['frame_ms']} does not "
                    f"match {frame_ms} from earlier lines")
            if record["split"] not in SPLITS:
                raise DatasetFormatError(
                    f"{path}:{lineno}: unknown split {record['split']!r}")
            grid = FrameGrid(num_frames=int(record["num_frames"]),
                             frame_duration_s=float(frame_ms) / 1000.0)
            vectors = np.asarray(record["features"], dtype=np.float64)
            if vectors.ndim != 2 or vectors.shape != (grid.num_frames,
                                                      int(record["feature_dim"])):
                raise DatasetFormatError(
                    f"{path}:{lineno}: features shape {vectors.shape} does not "
                    f"match num_frames x feature_dim")
            try:
                features = FrameFeatures(vectors=vectors, grid=grid,
                                         query_id=int(record["query"]))
                labels = EventLabels.from_seconds(record["event_times_s"], grid)
            except (DomainError, ShapeError) as exc:
                raise DatasetFormatError(f"{path}:{lineno}: {exc}") from exc
            examples.append((features, labels))
            splits.append(record["split"])
            ids.append(str(record["id"]))
    if not examples:
        raise DatasetFormatError(f"{path}: no examples")
    return TrainingSet(examples=examples, splits=splits, ids=ids)
