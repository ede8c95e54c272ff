"""Gradient training of the per-frame scorer against either objective.

Single-threaded and deterministic given the seed: initialization, batch
shuffling, and every update are driven by one seeded generator, so two
runs with the same configuration produce bitwise-identical checkpoints.
The returned model is the epoch checkpoint with the best held-out
tolerance accuracy (40 ms), earliest epoch on ties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import losses, metrics, scorer
from .errors import ConfigError, TrainingDivergedError
from .extract import binary_extract, posterior_modes_all
from .hazard import IntensityProfile
from .losses import binary_loss, interpolated_loss, poisson_nll
from .scorer import ScorerConfig, ScorerModel
from .synth import TrainingSet

LOSS_KINDS = ("binary", "poisson", "interp")

#: checkpoint-selection tolerance (seconds): one 40 ms frame
SELECT_TOLERANCE_S = 0.04


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    learning_rate: float = 1e-3
    batch_size: int = 8
    loss_kind: str = "poisson"
    interp_coefficient: float = 0.05
    seed: int = 0
    class_weight: str | float = "auto"
    weight_decay: float = 0.01

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be nonnegative")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.loss_kind not in LOSS_KINDS:
            raise ConfigError(f"loss_kind must be one of {LOSS_KINDS}, "
                              f"got {self.loss_kind!r}")
        if self.interp_coefficient < 0:
            raise ConfigError("interp_coefficient must be nonnegative")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay must be nonnegative")
        if self.class_weight != "auto":
            try:
                fixed = float(self.class_weight)
            except (TypeError, ValueError):
                raise ConfigError(f"class_weight must be 'auto' or a "
                                  f"number, got {self.class_weight!r}") from None
            if not fixed > 0:
                raise ConfigError("fixed class_weight must be positive")
            object.__setattr__(self, "class_weight", fixed)


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    dev_accuracy: float
    dev_mad_s: float


@dataclass
class TrainResult:
    model: ScorerModel
    history: list[EpochMetrics]
    selected_epoch: int


def example_loss(kind: str, frame_scores, labels, class_weight,
                 interp_coefficient) -> losses.LossResult:
    """One example's objective. ``interp`` pairs the binary objective with
    the point-process one on the same scores, the latter scaled by the
    coefficient (an in-package stand-in for pairing a host token loss
    with the point-process term)."""
    if kind == "binary":
        return binary_loss(frame_scores, labels, class_weight)
    if kind == "poisson":
        return poisson_nll(frame_scores, labels)
    return interpolated_loss(binary_loss(frame_scores, labels, class_weight),
                             poisson_nll(frame_scores, labels),
                             interp_coefficient)


class _Adam:
    """Adam with decoupled weight decay (betas 0.9/0.999, eps 1e-8)."""

    def __init__(self, weights: dict, learning_rate: float, weight_decay: float):
        self.lr = learning_rate
        self.wd = weight_decay
        self.beta1, self.beta2, self.eps = 0.9, 0.999, 1e-8
        self.step_count = 0
        self.m = {k: np.zeros_like(v) for k, v in weights.items()}
        self.v = {k: np.zeros_like(v) for k, v in weights.items()}

    def step(self, weights: dict, grads: dict) -> None:
        self.step_count += 1
        b1c = 1.0 - self.beta1 ** self.step_count
        b2c = 1.0 - self.beta2 ** self.step_count
        for key, g in grads.items():
            self.m[key] = self.beta1 * self.m[key] + (1.0 - self.beta1) * g
            self.v[key] = self.beta2 * self.v[key] + (1.0 - self.beta2) * g * g
            m_hat = self.m[key] / b1c
            v_hat = self.v[key] / b2c
            weights[key] -= self.lr * (m_hat / (np.sqrt(v_hat) + self.eps)
                                       + self.wd * weights[key])


def predict_example(config: ScorerConfig, weights: dict, features, count: int):
    """Extract ``count`` timestamps from one example under the configured
    head."""
    values, _ = scorer.forward(config, weights, features.vectors)
    frame_scores = losses.FrameScores(values=values, grid=features.grid)
    if config.head_kind == "binary":
        return binary_extract(frame_scores, count)
    profile = IntensityProfile.from_log_rates(frame_scores.values,
                                              frame_scores.grid)
    return posterior_modes_all(profile, count)


def _evaluate(config: ScorerConfig, weights: dict, examples) -> tuple[float, float]:
    preds = [predict_example(config, weights, feats, labels.count)
             for feats, labels in examples]
    truths = [labels for _, labels in examples]
    report = metrics.score(preds, truths, [SELECT_TOLERANCE_S])
    return report.accuracy_by_tolerance[SELECT_TOLERANCE_S], report.mad_s


def train(config: TrainConfig, scorer_config: ScorerConfig,
          dataset: TrainingSet) -> TrainResult:
    train_set = dataset.subset("train").examples
    dev_set = dataset.subset("dev").examples or train_set
    if not train_set:
        raise ConfigError("dataset has no training examples")
    if dataset.feature_dim != scorer_config.feature_dim:
        raise ConfigError(f"dataset feature_dim {dataset.feature_dim} does "
                          f"not match scorer feature_dim "
                          f"{scorer_config.feature_dim}")

    rng = np.random.default_rng(config.seed)
    weights = scorer.init_weights(scorer_config, config.seed)
    optimizer = _Adam(weights, config.learning_rate, config.weight_decay)

    history: list[EpochMetrics] = []
    best_weights = {k: v.copy() for k, v in weights.items()}
    best_accuracy = -1.0
    best_epoch = -1

    for epoch in range(config.epochs):
        order = rng.permutation(len(train_set))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            grads = None
            batch_loss = 0.0
            for idx in batch:
                features, labels = train_set[idx]
                values, hidden = scorer.forward(scorer_config, weights,
                                                features.vectors)
                frame_scores = losses.FrameScores(values=values,
                                                  grid=features.grid)
                result = example_loss(config.loss_kind, frame_scores, labels,
                                      config.class_weight,
                                      config.interp_coefficient)
                batch_loss += result.value
                g = scorer.backward(scorer_config, weights, features.vectors,
                                    hidden, result.gradient)
                if grads is None:
                    grads = g
                else:
                    for key in grads:
                        grads[key] += g[key]
            scale = 1.0 / len(batch)
            batch_loss *= scale
            if not np.isfinite(batch_loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch starting at "
                    f"example {start}: {batch_loss}")
            for key in grads:
                grads[key] *= scale
            optimizer.step(weights, grads)
            epoch_loss += batch_loss * len(batch)
        epoch_loss /= len(train_set)

        dev_accuracy, dev_mad = _evaluate(scorer_config, weights, dev_set)
        history.append(EpochMetrics(epoch=epoch, train_loss=epoch_loss,
                                    dev_accuracy=dev_accuracy,
                                    dev_mad_s=dev_mad))
        if dev_accuracy > best_accuracy:
            best_accuracy = dev_accuracy
            best_epoch = epoch
            best_weights = {k: v.copy() for k, v in weights.items()}

    model = ScorerModel(config=scorer_config, weights=best_weights,
                        seed=config.seed)
    return TrainResult(model=model, history=history, selected_epoch=best_epoch)
