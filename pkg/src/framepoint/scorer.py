"""A small per-frame scorer: a linear head or one tanh hidden layer
applied independently to every frame's feature vector.

The scorer is frame-local by construction, so it commutes with temporal
shifts of its input — the structural property behind length
generalization of the frame heads.

Checkpoint format (JSON):
    {"format_version": 1, "config": {...}, "seed": int,
     "weights": {"w1": [[...]], "b1": [...], "w2": [[...]], "b2": [...]}}
(w2/b2 present only when hidden_dim > 0.)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CheckpointFormatError, DomainError, ShapeError
from .losses import FrameScores
from .synth import FrameFeatures

FORMAT_VERSION = 1

HEAD_KINDS = ("binary", "poisson")


@dataclass(frozen=True)
class ScorerConfig:
    feature_dim: int
    hidden_dim: int = 0
    head_kind: str = "poisson"

    def __post_init__(self):
        if self.feature_dim < 1:
            raise DomainError(f"feature_dim must be >= 1, got {self.feature_dim}")
        if self.hidden_dim < 0:
            raise DomainError(f"hidden_dim must be >= 0, got {self.hidden_dim}")
        if self.head_kind not in HEAD_KINDS:
            raise DomainError(f"head_kind must be one of {HEAD_KINDS}, "
                              f"got {self.head_kind!r}")


@dataclass(frozen=True)
class ScorerModel:
    config: ScorerConfig
    weights: dict
    seed: int

    def __post_init__(self):
        _check_weight_shapes(self.config, self.weights)


def _check_weight_shapes(config: ScorerConfig, weights: dict) -> None:
    d, h = config.feature_dim, config.hidden_dim
    expected = ({"w1": (d, h), "b1": (h,), "w2": (h, 1), "b2": (1,)}
                if h > 0 else {"w1": (d, 1), "b1": (1,)})
    if set(weights) != set(expected):
        raise ShapeError(f"weight names {sorted(weights)} do not match "
                         f"expected {sorted(expected)}")
    for name, shape in expected.items():
        arr = weights[name]
        if arr.shape != shape:
            raise ShapeError(f"weight {name} has shape {arr.shape}, "
                             f"expected {shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"weight {name} contains non-finite values")


def init_weights(config: ScorerConfig, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    d, h = config.feature_dim, config.hidden_dim
    if h > 0:
        return {
            "w1": rng.normal(0.0, 1.0 / np.sqrt(d), size=(d, h)),
            "b1": np.zeros(h),
            "w2": rng.normal(0.0, 1.0 / np.sqrt(h), size=(h, 1)),
            "b2": np.zeros(1),
        }
    return {"w1": rng.normal(0.0, 1.0 / np.sqrt(d), size=(d, 1)),
            "b1": np.zeros(1)}


def init_model(config: ScorerConfig, seed: int) -> ScorerModel:
    return ScorerModel(config=config, weights=init_weights(config, seed),
                       seed=seed)


def forward(config: ScorerConfig, weights: dict, features: np.ndarray):
    """Scores for a (T, feature_dim) matrix, plus the hidden activations
    needed for backprop (None for the linear head)."""
    if features.ndim != 2 or features.shape[1] != config.feature_dim:
        raise ShapeError(f"features shape {features.shape} does not match "
                         f"feature_dim {config.feature_dim}")
    if config.hidden_dim > 0:
        hidden = np.tanh(features @ weights["w1"] + weights["b1"])
        scores = hidden @ weights["w2"][:, 0] + weights["b2"][0]
        return scores, hidden
    scores = features @ weights["w1"][:, 0] + weights["b1"][0]
    return scores, None


def backward(config: ScorerConfig, weights: dict, features: np.ndarray,
             hidden, grad_scores: np.ndarray) -> dict:
    """Chain-rule gradients of a loss w.r.t. the weights given its
    gradient w.r.t. the per-frame scores."""
    if config.hidden_dim > 0:
        gw2 = hidden.T @ grad_scores
        gb2 = np.sum(grad_scores)
        ghidden = np.outer(grad_scores, weights["w2"][:, 0])
        gz = ghidden * (1.0 - hidden * hidden)
        return {"w1": features.T @ gz, "b1": np.sum(gz, axis=0),
                "w2": gw2[:, None], "b2": np.array([gb2])}
    return {"w1": (features.T @ grad_scores)[:, None],
            "b1": np.array([np.sum(grad_scores)])}


def score_frames(model: ScorerModel, features: FrameFeatures) -> FrameScores:
    """Apply the head independently to every frame."""
    scores, _ = forward(model.config, model.weights, features.vectors)
    return FrameScores(values=scores, grid=features.grid)


def save_model(model: ScorerModel, path) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "config": {"feature_dim": model.config.feature_dim,
                   "hidden_dim": model.config.hidden_dim,
                   "head_kind": model.config.head_kind},
        "seed": model.seed,
        "weights": {name: arr.tolist() for name, arr in model.weights.items()},
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_model(path) -> ScorerModel:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CheckpointFormatError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(doc, dict):
        raise CheckpointFormatError(f"{path}: checkpoint must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise CheckpointFormatError(
            f"{path}: unsupported format_version {doc.get('format_version')!r}")
    for key in ("config", "seed", "weights"):
        if key not in doc:
            raise CheckpointFormatError(f"{path}: missing field {key!r}")
    cfg = doc["config"]
    try:
        config = ScorerConfig(feature_dim=int(cfg["feature_dim"]),
                              hidden_dim=int(cfg["hidden_dim"]),
                              head_kind=str(cfg["head_kind"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointFormatError(f"{path}: bad config section: {exc}") from exc
    weights = {name: np.asarray(arr, dtype=np.float64)
               for name, arr in doc["weights"].items()}
    return ScorerModel(config=config, weights=weights, seed=int(doc["seed"]))
