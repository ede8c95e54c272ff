"""Command-line entry point.

Subcommands wire the library into the experimental workflows:

    gen    synthesize a dataset (JSONL)
    train  fit a scorer, write checkpoint + metrics history
    infer  extract timestamps for every example of a dataset
    eval   score predictions against ground truth
    bench  single-pass vs simulated autoregressive inference cost
    api    one JSON request on stdin -> one JSON response on stdout

Configuration files are INI-style with [gen]/[train]/[eval]/[bench]
sections; unknown keys are rejected and any command-line flag overrides
its config value. Invalid input exits nonzero with a one-line JSON error
on stderr.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import metrics, scorer, synth, training as train_mod
from .errors import ConfigError, EvaluationError, FramepointError
from .extract import binary_extract, posterior_modes_all
from .grid import FrameGrid
from .hazard import IntensityProfile
from .losses import (AUTO_WEIGHT, FrameScores, binary_loss_from_marks,
                     poisson_nll_from_times)
from .scorer import ScorerConfig, load_model, save_model
from .synth import GenConfig, generate, read_dataset, write_dataset
from .training import TrainConfig

_CONFIG_KEYS = {
    "gen": {"num_examples", "duration_frames", "feature_dim",
            "num_event_types", "events_per_example", "signal_amplitude",
            "noise_sigma", "event_time_range_frames", "seed",
            "frame_duration_s", "min_separation_frames", "enforce_separation"},
    "train": {"epochs", "learning_rate", "batch_size", "loss",
              "interp_coefficient", "seed", "class_weight", "weight_decay",
              "hidden_dim", "head"},
    "eval": {"tolerances", "stratify", "bucket_edges", "split"},
    "bench": {"frames", "timestamps", "feature_dim", "hidden_dim", "repeats",
              "seed"},
}


def _load_config(path: str | None) -> dict:
    """Parse an INI config into {section: {key: raw string}}."""
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    sections = {}
    for section in parser.sections():
        if section not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        values = dict(parser.items(section))
        unknown = set(values) - _CONFIG_KEYS[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: "
                              f"{', '.join(sorted(unknown))}")
        sections[section] = values
    return sections


def _pick(flag_value, config_section: dict, key: str, parse, default):
    """Flag beats config beats default."""
    if flag_value is not None:
        return flag_value
    if key in config_section:
        raw = config_section[key]
        try:
            return parse(raw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from exc
    return default


def _parse_int_or_range(text: str):
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (int(lo), int(hi))
    return int(text)


def _parse_float_range(text: str) -> tuple:
    lo, hi = text.split(":", 1)
    return (float(lo), float(hi))


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_weight(text: str):
    if text == AUTO_WEIGHT:
        return AUTO_WEIGHT
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"class_weight must be 'auto' or a number, "
                          f"got {text!r}") from None


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


# ---------------------------------------------------------------- gen

def cmd_gen(args) -> int:
    section = _load_config(args.config).get("gen", {})
    cfg = GenConfig(
        num_examples=_pick(args.num_examples, section, "num_examples", int, 100),
        duration_frames=_pick(args.duration_frames, section, "duration_frames",
                              _parse_int_or_range, 200),
        feature_dim=_pick(args.feature_dim, section, "feature_dim", int, 16),
        num_event_types=_pick(args.num_event_types, section,
                              "num_event_types", int, 8),
        events_per_example=_pick(args.events_per_example, section,
                                 "events_per_example", _parse_int_or_range, 1),
        signal_amplitude=_pick(args.signal_amplitude, section,
                               "signal_amplitude", float, 1.0),
        noise_sigma=_pick(args.noise_sigma, section, "noise_sigma", float, 0.1),
        event_time_range_frames=_pick(args.event_time_range, section,
                                      "event_time_range_frames",
                                      _parse_float_range, None),
        seed=_pick(args.seed, section, "seed", int, 0),
        frame_duration_s=_pick(None, section, "frame_duration_s", float, 0.04),
        min_separation_frames=_pick(None, section, "min_separation_frames",
                                    float, 2.0),
        enforce_separation=_pick(
            None if not args.no_min_separation else False,
            section, "enforce_separation", _parse_bool, True),
    )
    dataset = generate(cfg)
    write_dataset(args.out, dataset)
    counts = {s: dataset.splits.count(s) for s in ("train", "dev", "test")}
    print(json.dumps({"written": args.out, "examples": len(dataset),
                      "splits": counts}))
    return 0


# -------------------------------------------------------------- train

def cmd_train(args) -> int:
    section = _load_config(args.config).get("train", {})
    dataset = read_dataset(args.data)
    config = TrainConfig(
        epochs=_pick(args.epochs, section, "epochs", int, 20),
        learning_rate=_pick(args.learning_rate, section, "learning_rate",
                            float, 1e-3),
        batch_size=_pick(args.batch_size, section, "batch_size", int, 8),
        loss_kind=_pick(args.loss, section, "loss", str, "poisson"),
        interp_coefficient=_pick(args.interp_coefficient, section,
                                 "interp_coefficient", float, 0.05),
        seed=_pick(args.seed, section, "seed", int, 0),
        class_weight=_pick(
            _parse_weight(args.class_weight) if args.class_weight else None,
            section, "class_weight", _parse_weight, AUTO_WEIGHT),
        weight_decay=_pick(None, section, "weight_decay", float, 0.01),
    )
    head = _pick(args.head, section, "head", str, None)
    if head is None:
        head = "binary" if config.loss_kind == "binary" else "poisson"
    scorer_config = ScorerConfig(
        feature_dim=dataset.feature_dim,
        hidden_dim=_pick(args.hidden_dim, section, "hidden_dim", int, 0),
        head_kind=head)
    result = train_mod.train(config, scorer_config, dataset)
    save_model(result.model, args.out)
    history_path = args.history or f"{args.out}.history.json"
    history_doc = {
        "selected_epoch": result.selected_epoch,
        "epochs": [{"epoch": m.epoch, "train_loss": m.train_loss,
                    "dev_accuracy": m.dev_accuracy, "dev_mad_s": m.dev_mad_s}
                   for m in result.history],
    }
    Path(history_path).write_text(json.dumps(history_doc, indent=2) + "\n")
    print(json.dumps({"checkpoint": args.out, "history": history_path,
                      "selected_epoch": result.selected_epoch,
                      "final_dev_accuracy":
                          result.history[result.selected_epoch].dev_accuracy}))
    return 0


# -------------------------------------------------------------- infer

def _infer_example(model, features, count: int):
    frame_scores = scorer.score_frames(model, features)
    if model.config.head_kind == "binary":
        return binary_extract(frame_scores, count)
    profile = IntensityProfile.from_log_rates(frame_scores.values,
                                              frame_scores.grid)
    return posterior_modes_all(profile, count)


def cmd_infer(args) -> int:
    model = load_model(args.model)
    dataset = read_dataset(args.data)
    if args.split:
        dataset = dataset.subset(args.split)
        if not dataset.examples:
            raise EvaluationError(f"no examples with split {args.split!r}")
    lines = []
    for (features, labels), ex_id in zip(dataset.examples, dataset.ids):
        count = args.count_override or labels.count
        if count < 1:
            raise EvaluationError(f"{ex_id}: no events to extract "
                                  "(use --count-override)")
        preds = _infer_example(model, features, count)
        lines.append(json.dumps([{"index": p.event_index, "start": p.time_s}
                                 for p in preds]))
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(json.dumps({"written": args.out, "examples": len(lines)}))
    return 0


# --------------------------------------------------------------- eval

def _read_predictions(path) -> list[list[float]]:
    rows = []
    with open(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EvaluationError(
                    f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(row, list):
                raise EvaluationError(f"{path}:{lineno}: expected a JSON array")
            try:
                rows.append([float(item["start"]) for item in row])
            except (TypeError, KeyError) as exc:
                raise EvaluationError(
                    f"{path}:{lineno}: each prediction needs a 'start' "
                    f"field") from exc
    return rows


def cmd_eval(args) -> int:
    section = _load_config(args.config).get("eval", {})
    tolerances = _pick(
        _parse_float_list(args.tolerances) if args.tolerances else None,
        section, "tolerances", _parse_float_list, [0.02, 0.04, 0.1])
    rule = _pick(args.stratify, section, "stratify", str, "none")
    edges = _pick(
        _parse_float_list(args.bucket_edges) if args.bucket_edges else None,
        section, "bucket_edges", _parse_float_list, None)
    split = _pick(args.split, section, "split", str, None)

    preds = _read_predictions(args.pred)
    dataset = read_dataset(args.truth)
    if split:
        dataset = dataset.subset(split)
    truths = [labels for _, labels in dataset.examples]
    if len(preds) != len(truths):
        raise EvaluationError(f"{len(preds)} prediction lines vs "
                              f"{len(truths)} truth examples")
    if rule == "none":
        report = metrics.score(preds, truths, tolerances, ids=dataset.ids)
    elif rule == "count":
        report = metrics.stratify(preds, truths, tolerances,
                                  rule="event_count", ids=dataset.ids)
    elif rule == "time":
        report = metrics.stratify(preds, truths, tolerances,
                                  rule="time_range", edges=edges,
                                  ids=dataset.ids)
    else:
        raise ConfigError(f"unknown stratify rule {rule!r} "
                          "(expected none, count, or time)")
    print(metrics.render_table(report))
    if args.out:
        Path(args.out).write_text(json.dumps(report.as_dict(), indent=2) + "\n")
    if args.csv:
        Path(args.csv).write_text(metrics.render_csv(report))
    return 0


# -------------------------------------------------------------- bench

def cmd_bench(args) -> int:
    section = _load_config(args.config).get("bench", {})
    frames = _pick(_parse_int_list(args.frames) if args.frames else None,
                   section, "frames", _parse_int_list, [1000, 8000])
    timestamps = _pick(args.timestamps, section, "timestamps", int, 25)
    feature_dim = _pick(args.feature_dim, section, "feature_dim", int, 64)
    hidden_dim = _pick(args.hidden_dim, section, "hidden_dim", int, 64)
    repeats = _pick(args.repeats, section, "repeats", int, 3)
    seed = _pick(args.seed, section, "seed", int, 0)
    model = load_model(args.model) if args.model else None
    report = bench_mod.run_bench(frames, timestamps, model=model,
                                 feature_dim=feature_dim,
                                 hidden_dim=hidden_dim, repeats=repeats,
                                 seed=seed)
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


# ---------------------------------------------------------------- api

def _api_response(request: dict) -> dict:
    op = request.get("op")
    fd = float(request.get("frame_duration_s", 0.04))
    if op == "poisson_nll":
        values = np.asarray(request["scores"], dtype=np.float64)
        grid = FrameGrid(num_frames=values.size, frame_duration_s=fd)
        result = poisson_nll_from_times(
            FrameScores(values=values, grid=grid),
            request["event_times_frames"])
        return {"value": result.value, "gradient": result.gradient.tolist()}
    if op == "binary_loss":
        values = np.asarray(request["scores"], dtype=np.float64)
        grid = FrameGrid(num_frames=values.size, frame_duration_s=fd)
        weight = request.get("weight", AUTO_WEIGHT)
        result = binary_loss_from_marks(
            FrameScores(values=values, grid=grid),
            np.asarray(request["marks"], dtype=np.float64),
            weight if weight == AUTO_WEIGHT else float(weight))
        return {"value": result.value, "gradient": result.gradient.tolist()}
    if op == "extract":
        values = np.asarray(request["scores"], dtype=np.float64)
        grid = FrameGrid(num_frames=values.size, frame_duration_s=fd)
        frame_scores = FrameScores(values=values, grid=grid)
        count = int(request["count"])
        mode = request.get("mode", "poisson")
        if mode == "binary":
            preds = binary_extract(frame_scores, count)
        elif mode == "poisson":
            profile = IntensityProfile.from_log_rates(values, grid)
            preds = posterior_modes_all(profile, count)
        else:
            raise ConfigError(f"unknown extract mode {mode!r}")
        return {"seconds": [p.time_s for p in preds]}
    raise ConfigError(f"unknown api op {op!r} "
                      "(expected poisson_nll, binary_loss, or extract)")


def cmd_api(args) -> int:
    raw = sys.stdin.read()
    try:
        request = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON request: {exc.msg}") from exc
    if not isinstance(request, dict):
        raise ConfigError("api request must be a JSON object")
    try:
        response = _api_response(request)
    except KeyError as exc:
        raise ConfigError(f"api request missing field {exc.args[0]!r}") from exc
    print(json.dumps(response))
    return 0


# --------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framepoint",
        description="Frame-level event timestamping: synthetic data, "
                    "training, extraction, evaluation, benchmarking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset (JSONL)")
    p.add_argument("--config", help="INI config with a [gen] section")
    p.add_argument("--out", required=True, help="output JSONL path")
    p.add_argument("--num-examples", type=int, dest="num_examples")
    p.add_argument("--duration-frames", type=_parse_int_or_range,
                   dest="duration_frames", metavar="N|LO:HI")
    p.add_argument("--feature-dim", type=int, dest="feature_dim")
    p.add_argument("--num-event-types", type=int, dest="num_event_types")
    p.add_argument("--events-per-example", type=_parse_int_or_range,
                   dest="events_per_example", metavar="N|LO:HI")
    p.add_argument("--signal-amplitude", type=float, dest="signal_amplitude")
    p.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    p.add_argument("--event-time-range", type=_parse_float_range,
                   dest="event_time_range", metavar="LO:HI",
                   help="allowed event window in frames")
    p.add_argument("--seed", type=int)
    p.add_argument("--no-min-separation", action="store_true",
                   help="allow events closer than the minimum separation")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train a scorer on a dataset")
    p.add_argument("--config", help="INI config with a [train] section")
    p.add_argument("--data", required=True, help="dataset JSONL")
    p.add_argument("--out", required=True, help="checkpoint JSON path")
    p.add_argument("--loss", choices=train_mod.LOSS_KINDS)
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--interp-coefficient", type=float,
                   dest="interp_coefficient")
    p.add_argument("--class-weight", dest="class_weight",
                   help="'auto' or a fixed positive weight")
    p.add_argument("--hidden-dim", type=int, dest="hidden_dim")
    p.add_argument("--head", choices=scorer.HEAD_KINDS,
                   help="extraction head (defaults to match the loss)")
    p.add_argument("--history", help="metrics history path "
                                     "(default: <out>.history.json)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="extract timestamps for a dataset")
    p.add_argument("--model", required=True, help="checkpoint JSON")
    p.add_argument("--data", required=True, help="dataset JSONL")
    p.add_argument("--out", required=True, help="predictions JSONL path")
    p.add_argument("--split", choices=synth.SPLITS,
                   help="restrict to one split (default: all lines)")
    p.add_argument("--count-override", type=int, dest="count_override",
                   help="extract this many timestamps instead of the "
                        "ground-truth count")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--config", help="INI config with an [eval] section")
    p.add_argument("--pred", required=True, help="predictions JSONL")
    p.add_argument("--truth", required=True, help="dataset JSONL")
    p.add_argument("--tolerances", help="comma-separated seconds "
                                        "(default 0.02,0.04,0.1)")
    p.add_argument("--stratify", choices=("none", "count", "time"))
    p.add_argument("--bucket-edges", dest="bucket_edges",
                   help="comma-separated seconds for --stratify time")
    p.add_argument("--split", choices=synth.SPLITS,
                   help="restrict truth to one split")
    p.add_argument("--out", help="write the report as JSON here")
    p.add_argument("--csv", help="write the report as CSV here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="inference cost benchmark")
    p.add_argument("--config", help="INI config with a [bench] section")
    p.add_argument("--frames", help="comma-separated frame counts "
                                    "(default 1000,8000)")
    p.add_argument("--timestamps", type=int)
    p.add_argument("--model", help="checkpoint JSON (default: fresh scorer)")
    p.add_argument("--feature-dim", type=int, dest="feature_dim")
    p.add_argument("--hidden-dim", type=int, dest="hidden_dim")
    p.add_argument("--repeats", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("api", help="serve one JSON request from stdin")
    p.set_defaults(func=cmd_api)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FramepointError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
