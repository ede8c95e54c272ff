"""Regenerate the shared binding parity vectors (testdata/vectors.json).

Expected outputs are computed by the Python core library directly; the
TypeScript tests replay the requests through the `framepoint api`
boundary and require bit-identical numbers. The 750-frame cross-check
additionally records what `framepoint infer` wrote for the same scores,
tying the binding path to the CLI path.

Run from the frontend directory:  python3 scripts/make_vectors.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

import framepoint as fp
import framepoint._kernels as kernels
from framepoint.scorer import init_model, save_model, score_frames
from framepoint.synth import GenConfig, generate, write_dataset

OUT = Path(__file__).resolve().parent.parent / "testdata" / "vectors.json"


def loss_case(name, request, result):
    return {"name": name, "request": request,
            "expected": {"value": result.value,
                         "gradient": result.gradient.tolist()}}


def extract_case(name, request, seconds):
    return {"name": name, "request": request, "expected": {"seconds": seconds}}


def make_cases():
    cases = []
    grid4 = fp.FrameGrid(4)

    # uniform-score single event: value is log 4
    request = {"op": "poisson_nll", "scores": [0.0, 0.0, 0.0, 0.0],
               "event_times_frames": [1.5]}
    result = fp.poisson_nll_from_times(
        fp.FrameScores(values=np.zeros(4), grid=grid4), [1.5])
    cases.append(loss_case("poisson_uniform_log4", request, result))

    rng = np.random.default_rng(614)
    scores = rng.normal(size=16)
    times = np.sort(rng.uniform(0, 16, size=3))
    request = {"op": "poisson_nll", "scores": scores.tolist(),
               "event_times_frames": times.tolist()}
    result = fp.poisson_nll_from_times(
        fp.FrameScores(values=scores, grid=fp.FrameGrid(16)), times)
    cases.append(loss_case("poisson_random_16", request, result))

    scores = rng.normal(size=12)
    marks = np.zeros(12)
    marks[[2, 7]] = 1.0
    for weight in ("auto", 3.5):
        request = {"op": "binary_loss", "scores": scores.tolist(),
                   "marks": marks.tolist(), "weight": weight}
        result = fp.binary_loss_from_marks(
            fp.FrameScores(values=scores, grid=fp.FrameGrid(12)), marks,
            weight)
        cases.append(loss_case(f"binary_weight_{weight}", request, result))

    probs = [0.1, 0.9, 0.2, 0.8]
    logits = np.log(probs).tolist()
    request = {"op": "extract", "scores": logits, "mode": "binary",
               "count": 2}
    preds = fp.binary_extract(
        fp.FrameScores(values=np.array(logits), grid=grid4), 2)
    cases.append(extract_case("extract_binary_top2", request,
                              [p.time_s for p in preds]))

    scores = rng.normal(size=20)
    request = {"op": "extract", "scores": scores.tolist(),
               "mode": "poisson", "count": 3, "frame_duration_s": 0.02}
    profile = fp.IntensityProfile.from_log_rates(scores,
                                                 fp.FrameGrid(20, 0.02))
    modes = fp.posterior_modes_all(profile, 3)
    cases.append(extract_case("extract_poisson_modes", request,
                              [p.time_s for p in modes]))
    return cases


def make_infer_crosscheck():
    """Score a 750-frame example with a seeded checkpoint, run the real
    `framepoint infer` on it, and record both the scores and the CLI's
    output seconds."""
    dataset = generate(GenConfig(num_examples=1, duration_frames=750,
                                 feature_dim=8, events_per_example=3,
                                 num_event_types=1, noise_sigma=0.05,
                                 seed=20))
    model = init_model(fp.ScorerConfig(feature_dim=8, hidden_dim=0,
                                       head_kind="poisson"), seed=33)
    features, labels = dataset.examples[0]
    scores = score_frames(model, features)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        write_dataset(tmp / "data.jsonl", dataset)
        save_model(model, tmp / "model.json")
        proc = subprocess.run(
            [sys.executable, "-m", "framepoint", "infer",
             "--model", str(tmp / "model.json"),
             "--data", str(tmp / "data.jsonl"),
             "--out", str(tmp / "preds.jsonl")],
            capture_output=True, text=True, check=True)
        line = (tmp / "preds.jsonl").read_text().splitlines()[0]
    cli_seconds = [item["start"] for item in json.loads(line)]
    return {"scores": scores.values.tolist(), "count": labels.count,
            "frame_duration_s": 0.04, "expected_seconds": cli_seconds}


def main():
    doc = {
        "backend": kernels.active_name(),
        "cases": make_cases(),
        "infer_crosscheck": make_infer_crosscheck(),
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {OUT} ({len(doc['cases'])} cases, backend "
          f"{doc['backend']})")


if __name__ == "__main__":
    main()
