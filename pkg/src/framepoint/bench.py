"""Inference-cost benchmark.

Compares one parallel scoring pass plus direct timestamp extraction
against a simulated autoregressive baseline that re-invokes the same
scorer once per emitted character (10 characters per timestamp, the cost
of spelling out one bracketed decimal timestamp token by token). Also
times the two kernel backends against each other and runs the structural
shift-equivariance check that underpins length generalization.
"""

from __future__ import annotations

import time

import numpy as np

from . import _kernels, scorer
from .errors import ConfigError
from .extract import posterior_modes_all
from .grid import FrameGrid
from .hazard import IntensityProfile
from .scorer import ScorerConfig, ScorerModel
from .synth import FrameFeatures

CHARS_PER_TIMESTAMP = 10


def _median_time(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def shift_equivariance_check(model: ScorerModel, num_frames: int = 64,
                             shift: int = 7, seed: int = 0) -> dict:
    """The scorer is frame-local, so shifting the feature sequence must
    shift the scores identically (bitwise, via a circular shift)."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((num_frames, model.config.feature_dim))
    base, _ = scorer.forward(model.config, model.weights, X)
    shifted, _ = scorer.forward(model.config, model.weights,
                                np.roll(X, shift, axis=0))
    passed = bool(np.array_equal(np.roll(base, shift), shifted))
    return {"passed": passed, "frames": num_frames, "shift": shift}


def _time_kernels(backend, repeats: int, seed: int) -> dict:
    """Kernel timings at a training-scale and a long-clip frame count.

    Small sequences are where the compiled core pays off (per-call
    overhead dominates numpy there); large ones amortize either way.
    """
    out = {}
    for T, n, loops in ((256, 4, 200), (4096, 16, 20)):
        rng = np.random.default_rng(seed)
        scores = rng.normal(size=T)
        marks = (rng.uniform(size=T) < 0.05).astype(np.float64)
        mult = np.zeros(T)
        mult[rng.choice(T, size=n, replace=False)] = 1.0
        rates = np.exp(rng.normal(size=T))
        knots = np.concatenate([[0.0], np.cumsum(rates)])

        def loop(fn):
            def run():
                for _ in range(loops):
                    fn()
            return _median_time(run, repeats) / loops

        out[f"frames_{T}"] = {
            "poisson_nll_s": loop(
                lambda: backend.poisson_nll(scores, mult, n)),
            "binary_loss_s": loop(
                lambda: backend.binary_loss(scores, marks, 20.0)),
            "mode_search_all_s": loop(
                lambda: [backend.mode_search(rates, knots, n, i)
                         for i in range(1, n + 1)]),
        }
    return out


def run_bench(frames_list, timestamps: int, model: ScorerModel | None = None,
              feature_dim: int = 64, hidden_dim: int = 64, repeats: int = 3,
              seed: int = 0) -> dict:
    if timestamps < 1:
        raise ConfigError("timestamps must be >= 1")
    if model is None:
        model = scorer.init_model(
            ScorerConfig(feature_dim=feature_dim, hidden_dim=hidden_dim,
                         head_kind="poisson"), seed)
    rng = np.random.default_rng(seed)
    results = []
    for T in frames_list:
        T = int(T)
        if T < timestamps:
            raise ConfigError(f"frames={T} smaller than timestamps={timestamps}")
        grid = FrameGrid(num_frames=T)
        X = rng.standard_normal((T, model.config.feature_dim))
        features = FrameFeatures(vectors=X, grid=grid, query_id=0)

        def single_pass():
            frame_scores = scorer.score_frames(model, features)
            profile = IntensityProfile.from_log_rates(frame_scores.values, grid)
            posterior_modes_all(profile, timestamps)

        auto_invocations = CHARS_PER_TIMESTAMP * timestamps

        def autoregressive():
            for _ in range(auto_invocations):
                scorer.score_frames(model, features)

        single_s = _median_time(single_pass, repeats)
        auto_s = _median_time(autoregressive, repeats)
        results.append({
            "frames": T,
            "single_pass": {"seconds": single_s, "invocations": 1},
            "autoregressive": {"seconds": auto_s,
                               "invocations": auto_invocations},
            "speedup": auto_s / single_s if single_s > 0 else float("inf"),
        })

    backends = {name: _time_kernels(_kernels.get_backend(name), repeats, seed)
                for name in _kernels.available()}
    return {
        "timestamps": timestamps,
        "chars_per_timestamp": CHARS_PER_TIMESTAMP,
        "scorer": {"feature_dim": model.config.feature_dim,
                   "hidden_dim": model.config.hidden_dim},
        "active_backend": _kernels.active_name(),
        "results": results,
        "kernel_backends": backends,
        "shift_equivariance": shift_equivariance_check(model),
    }
