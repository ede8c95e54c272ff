import json
import subprocess
import sys

import numpy as np
import pytest

from framepoint import FrameGrid, FrameScores, binary_loss_from_marks
from framepoint.cli import main


def run_cli(*args, stdin=None):
    return subprocess.run([sys.executable, "-m", "framepoint", *args],
                          capture_output=True, text=True, input=stdin)


SMOKE_GEN = ["--num-examples", "40", "--duration-frames", "30",
             "--feature-dim", "6", "--noise-sigma", "0.05", "--seed", "3"]


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """gen -> train -> infer artifacts shared by several tests."""
    root = tmp_path_factory.mktemp("pipeline")
    data = root / "data.jsonl"
    model = root / "model.json"
    preds = root / "preds.jsonl"
    assert main(["gen", "--out", str(data), *SMOKE_GEN]) == 0
    assert main(["train", "--data", str(data), "--out", str(model),
                 "--loss", "poisson", "--epochs", "6",
                 "--learning-rate", "0.05", "--seed", "0"]) == 0
    assert main(["infer", "--model", str(model), "--data", str(data),
                 "--out", str(preds)]) == 0
    return {"root": root, "data": data, "model": model, "preds": preds}


class TestHelp:
    @pytest.mark.parametrize("cmd", ["gen", "train", "infer", "eval",
                                     "bench", "api"])
    def test_help_exits_zero(self, cmd):
        proc = run_cli(cmd, "--help")
        assert proc.returncode == 0
        assert cmd in proc.stdout


class TestGen:
    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert main(["gen", "--out", str(a), *SMOKE_GEN]) == 0
        assert main(["gen", "--out", str(b), *SMOKE_GEN]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[gen]\nnum_examples = 5\nwavelength = 3\n")
        code = main(["gen", "--config", str(cfg),
                     "--out", str(tmp_path / "x.jsonl")])
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"] == "ConfigError"
        assert "wavelength" in err["message"]

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "gen.ini"
        cfg.write_text("[gen]\nnum_examples = 7\nduration_frames = 25\n"
                       "feature_dim = 5\nseed = 1\n")
        out = tmp_path / "d.jsonl"
        assert main(["gen", "--config", str(cfg), "--out", str(out),
                     "--num-examples", "4"]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 4
        first = json.loads(lines[0])
        assert first["num_frames"] == 25
        assert first["feature_dim"] == 5

    def test_missing_config_file(self, capsys):
        assert main(["gen", "--config", "/nonexistent.ini",
                     "--out", "/tmp/x.jsonl"]) == 1
        assert "ConfigError" in capsys.readouterr().err


class TestTrainInfer:
    def test_pipeline_artifacts(self, pipeline):
        model_doc = json.loads(pipeline["model"].read_text())
        assert model_doc["format_version"] == 1
        assert model_doc["config"]["head_kind"] == "poisson"
        history = json.loads(
            (pipeline["root"] / "model.json.history.json").read_text())
        assert len(history["epochs"]) == 6
        assert 0 <= history["selected_epoch"] < 6

    def test_prediction_lines_are_arrays(self, pipeline):
        lines = pipeline["preds"].read_text().splitlines()
        data_lines = pipeline["data"].read_text().splitlines()
        assert len(lines) == len(data_lines)
        row = json.loads(lines[0])
        assert isinstance(row, list)
        assert set(row[0]) == {"index", "start"}
        truth = json.loads(data_lines[0])
        assert len(row) == len(truth["event_times_s"])

    def test_infer_deterministic(self, pipeline, tmp_path):
        again = tmp_path / "again.jsonl"
        assert main(["infer", "--model", str(pipeline["model"]),
                     "--data", str(pipeline["data"]),
                     "--out", str(again)]) == 0
        assert again.read_bytes() == pipeline["preds"].read_bytes()

    def test_count_override(self, pipeline, tmp_path):
        out = tmp_path / "k3.jsonl"
        assert main(["infer", "--model", str(pipeline["model"]),
                     "--data", str(pipeline["data"]), "--out", str(out),
                     "--count-override", "3"]) == 0
        assert all(len(json.loads(line)) == 3
                   for line in out.read_text().splitlines())

    def test_missing_data_file_errors(self, pipeline, capsys):
        code = main(["infer", "--model", str(pipeline["model"]),
                     "--data", "/nonexistent.jsonl", "--out", "/tmp/x"])
        assert code == 1


class TestEval:
    def test_eval_identical_pred_truth(self, pipeline, tmp_path, capsys):
        # predictions copied from ground truth score perfectly
        perfect = tmp_path / "perfect.jsonl"
        rows = []
        for line in pipeline["data"].read_text().splitlines():
            record = json.loads(line)
            rows.append(json.dumps([
                {"index": i + 1, "start": s}
                for i, s in enumerate(record["event_times_s"])]))
        perfect.write_text("\n".join(rows) + "\n")
        out = tmp_path / "report.json"
        code = main(["eval", "--pred", str(perfect),
                     "--truth", str(pipeline["data"]),
                     "--tolerances", "0.02,0.04,0.1", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["accuracy_by_tolerance"] == {"0.02": 1.0, "0.04": 1.0,
                                                   "0.1": 1.0}
        assert report["mad_s"] == 0.0
        table = capsys.readouterr().out
        assert "acc@0.04s" in table

    def test_eval_trained_predictions(self, pipeline, tmp_path):
        out = tmp_path / "report.json"
        assert main(["eval", "--pred", str(pipeline["preds"]),
                     "--truth", str(pipeline["data"]),
                     "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["n_events"] > 0
        assert report["accuracy_by_tolerance"]["0.1"] >= 0.5

    def test_stratified_eval_with_csv(self, pipeline, tmp_path):
        csv = tmp_path / "report.csv"
        assert main(["eval", "--pred", str(pipeline["preds"]),
                     "--truth", str(pipeline["data"]),
                     "--stratify", "count", "--csv", str(csv)]) == 0
        header = csv.read_text().splitlines()[0]
        assert header.startswith("stratum,n_events")

    def test_count_mismatch_is_error(self, pipeline, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        lines = pipeline["preds"].read_text().splitlines()
        first = json.loads(lines[0])
        first.append({"index": 99, "start": 0.0})
        lines[0] = json.dumps(first)
        bad.write_text("\n".join(lines) + "\n")
        code = main(["eval", "--pred", str(bad),
                     "--truth", str(pipeline["data"])])
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"] == "EvaluationError"
        assert "ex00000" in err["message"]


class TestBench:
    def test_bench_report_shape(self, tmp_path):
        out = tmp_path / "bench.json"
        code = main(["bench", "--frames", "256", "--timestamps", "4",
                     "--feature-dim", "8", "--hidden-dim", "0",
                     "--repeats", "1", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        entry = report["results"][0]
        assert entry["single_pass"]["invocations"] == 1
        assert entry["autoregressive"]["invocations"] == 40
        assert report["shift_equivariance"]["passed"] is True
        assert set(report["kernel_backends"]) == {"compiled", "python"} or \
            set(report["kernel_backends"]) == {"python"}


class TestApi:
    def test_poisson_op_matches_library(self):
        from framepoint import poisson_nll_from_times
        values = [0.2, -0.5, 1.0, 0.0]
        request = {"op": "poisson_nll", "scores": values,
                   "event_times_frames": [1.5, 3.0]}
        proc = run_cli("api", stdin=json.dumps(request))
        assert proc.returncode == 0, proc.stderr
        response = json.loads(proc.stdout)
        scores = FrameScores(values=np.array(values), grid=FrameGrid(4))
        expected = poisson_nll_from_times(scores, [1.5, 3.0])
        assert response["value"] == expected.value
        assert response["gradient"] == expected.gradient.tolist()

    def test_binary_op_auto_weight(self):
        values = [0.5, -2.0, 3.0]
        request = {"op": "binary_loss", "scores": values,
                   "marks": [0, 1, 0], "weight": "auto"}
        proc = run_cli("api", stdin=json.dumps(request))
        assert proc.returncode == 0, proc.stderr
        response = json.loads(proc.stdout)
        scores = FrameScores(values=np.array(values), grid=FrameGrid(3))
        expected = binary_loss_from_marks(scores, np.array([0.0, 1.0, 0.0]),
                                          "auto")
        assert response["value"] == expected.value

    def test_extract_ops(self):
        request = {"op": "extract", "scores": [0.0, 3.0, 0.0, 1.0],
                   "mode": "binary", "count": 2}
        proc = run_cli("api", stdin=json.dumps(request))
        response = json.loads(proc.stdout)
        assert response["seconds"] == [pytest.approx(0.06),
                                       pytest.approx(0.14)]
        request["mode"] = "poisson"
        request["count"] = 1
        proc = run_cli("api", stdin=json.dumps(request))
        assert json.loads(proc.stdout)["seconds"] == [pytest.approx(0.06)]

    def test_bad_request_is_one_line_json_error(self):
        proc = run_cli("api", stdin="{\"op\": \"fourier\"}")
        assert proc.returncode == 1
        err = json.loads(proc.stderr.strip())
        assert err["error"] == "ConfigError"

    def test_invalid_json_rejected(self):
        proc = run_cli("api", stdin="not json")
        assert proc.returncode == 1
        assert json.loads(proc.stderr.strip())["error"] == "ConfigError"


class TestConfigRobustness:
    def test_unparseable_config_value_is_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[train]\nepochs = many\n")
        data = tmp_path / "d.jsonl"
        assert main(["gen", "--out", str(data), "--num-examples", "5",
                     "--duration-frames", "10", "--feature-dim", "3"]) == 0
        capsys.readouterr()
        code = main(["train", "--config", str(cfg), "--data", str(data),
                     "--out", str(tmp_path / "m.json")])
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"] == "ConfigError"
        assert "epochs" in err["message"]

    def test_bogus_class_weight_rejected(self, tmp_path, capsys):
        data = tmp_path / "d.jsonl"
        assert main(["gen", "--out", str(data), "--num-examples", "5",
                     "--duration-frames", "10", "--feature-dim", "3"]) == 0
        capsys.readouterr()
        code = main(["train", "--data", str(data),
                     "--out", str(tmp_path / "m.json"),
                     "--loss", "binary", "--epochs", "1",
                     "--class-weight", "heavy"])
        assert code == 1
        assert "ConfigError" in capsys.readouterr().err
