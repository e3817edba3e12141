import json
from pathlib import Path

import numpy as np
import pytest

from tsgbm.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
TINY = str(CONFIG_DIR / "weibull_tiny.yaml")


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _read_csv(path: Path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config ")
    header = lines[1].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])
    return header, data


class TestCrlbCommand:
    def test_writes_table(self, tmp_path, capsys):
        code, out, _ = _run(capsys, "crlb", "--config", TINY, "--out", str(tmp_path))
        assert code == 0
        summary = json.loads(out)
        header, data = _read_csv(Path(summary["crlb_table"]))
        assert header == ["eta", "gamma", "crlb_eta", "crlb_gamma"]
        assert data.shape == (2, 4)
        assert (data[:, 2:] > 0).all()

    def test_rejected_for_dynamical_mechanism(self, tmp_path, capsys):
        cfg = str(CONFIG_DIR / "state_space_smoke.yaml")
        code, _, err = _run(capsys, "crlb", "--config", cfg, "--out", str(tmp_path))
        assert code == 2
        assert "weibull" in err


class TestTrainEvaluateScatter:
    def test_full_cycle(self, tmp_path, capsys):
        out = str(tmp_path)
        code, stdout, _ = _run(capsys, "train", "--config", TINY, "--out", out)
        assert code == 0
        summary = json.loads(stdout)
        assert Path(summary["estimator"]).exists()
        assert len(summary["trees"]) == 2

        code, stdout, stderr = _run(capsys, "evaluate", "--config", TINY, "--out", out)
        assert code == 0
        assert "loading estimator" in stderr  # reuses the trained model
        header, data = _read_csv(Path(json.loads(stdout)["mse_table"]))
        assert header == ["eta", "gamma", "mse_eta", "mse_gamma", "crlb_eta", "crlb_gamma"]
        assert data.shape == (2, 6)
        assert (data[:, 2:4] >= 0).all()

        code, stdout, _ = _run(capsys, "scatter", "--config", TINY, "--out", out)
        assert code == 0
        header, data = _read_csv(Path(json.loads(stdout)["scatter"]))
        assert header == ["true_eta", "true_gamma", "est_eta", "est_gamma"]
        assert data.shape == (100, 4)

        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["rng_algorithm"] == "PCG64"
        assert manifest["config_fingerprint"] in (tmp_path / "mse_table.csv").read_text()

    def test_simulate_writes_sequences(self, tmp_path, capsys):
        code, stdout, _ = _run(capsys, "simulate", "--config", TINY, "--out", str(tmp_path))
        assert code == 0
        files = json.loads(stdout)["files"]
        assert len(files) == 2
        body = Path(files[0]).read_text().splitlines()
        assert body[0].startswith("# config ")
        values = [float(v) for v in body[3:]]
        assert len(values) == 500 and all(v > 0 for v in values)


class TestErrorPaths:
    def test_missing_config_is_config_error(self, tmp_path, capsys):
        code, _, err = _run(capsys, "train", "--config", "no_such.yaml", "--out", str(tmp_path))
        assert code == 2
        assert "config error" in err

    def test_bad_thread_count(self, tmp_path, capsys):
        code, _, err = _run(capsys, "train", "--config", TINY, "--threads", "0", "--out", str(tmp_path))
        assert code == 2

    def test_seed_override_changes_outputs(self, tmp_path, capsys):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        out_a.mkdir(), out_b.mkdir()
        assert _run(capsys, "simulate", "--config", TINY, "--out", str(out_a))[0] == 0
        assert _run(capsys, "simulate", "--config", TINY, "--seed", "99", "--out", str(out_b))[0] == 0
        assert (out_a / "sequence_0.csv").read_text() != (out_b / "sequence_0.csv").read_text()
