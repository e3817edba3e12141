from pathlib import Path

import pytest

from tsgbm.config import ExperimentConfig, RunManifest
from tsgbm.core import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = {
    "name": "unit",
    "mechanism": {"kind": "weibull", "N": 100},
    "prior": {"lo": [1.0, 1.0], "hi": [20.0, 20.0]},
    "compressor": {"kind": "quantiles", "n": 5},
    "feature_degree": 2,
    "gbm": {"iterations": 10},
    "loss": {"kind": "softmax_minimax", "K": 1000.0},
    "M_train": 100,
    "M_test": 10,
    "MC": 10,
    "theta_test": [[2.0, 2.0]],
    "master_seed": 1,
}


def _raw(**overrides):
    raw = {k: (dict(v) if isinstance(v, dict) else v) for k, v in MINIMAL.items()}
    raw.update(overrides)
    return raw


class TestExperimentConfig:
    def test_yaml_round_trip_preserves_fingerprint(self):
        cfg = ExperimentConfig.from_dict(_raw())
        again = ExperimentConfig.from_yaml(cfg.to_yaml())
        assert again == cfg
        assert again.fingerprint() == cfg.fingerprint()

    def test_fingerprint_changes_with_content(self):
        a = ExperimentConfig.from_dict(_raw())
        b = ExperimentConfig.from_dict(_raw(master_seed=2))
        assert a.fingerprint() != b.fingerprint()
        assert len(a.fingerprint()) == 16

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            ExperimentConfig.from_dict(_raw(fidelity=3))

    def test_unknown_nested_key(self):
        raw = _raw()
        raw["gbm"]["boosting_rounds"] = 5
        with pytest.raises(ConfigError, match="gbm"):
            ExperimentConfig.from_dict(raw)

    def test_missing_section(self):
        raw = _raw()
        del raw["mechanism"]
        with pytest.raises(ConfigError, match="missing config section"):
            ExperimentConfig.from_dict(raw)

    def test_prior_dim_mismatch(self):
        raw = _raw()
        raw["prior"] = {"lo": [0.0], "hi": [1.0]}
        with pytest.raises(ConfigError, match="dims"):
            ExperimentConfig.from_dict(raw)

    def test_theta_test_dim_mismatch(self):
        with pytest.raises(ConfigError, match="theta_test"):
            ExperimentConfig.from_dict(_raw(theta_test=[[0.3]]))

    def test_malformed_yaml(self):
        with pytest.raises(ConfigError, match="malformed"):
            ExperimentConfig.from_yaml("a: [unclosed")

    def test_feature_degree_bounds(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(_raw(feature_degree=3))

    def test_per_dimension_bulk_weight_round_trip(self):
        raw = _raw()
        raw["loss"]["bulk_weight"] = [0.3, 0.1]
        cfg = ExperimentConfig.from_dict(raw)
        assert cfg.loss.bulk_weight == (0.3, 0.1)
        again = ExperimentConfig.from_yaml(cfg.to_yaml())
        assert again == cfg and again.fingerprint() == cfg.fingerprint()

    def test_bulk_weight_dim_mismatch(self):
        raw = _raw()
        raw["loss"]["bulk_weight"] = [0.3]
        with pytest.raises(ConfigError, match="bulk_weight"):
            ExperimentConfig.from_dict(raw)

    def test_shipped_configs_parse(self):
        paths = sorted(CONFIG_DIR.glob("*.yaml"))
        assert paths, "no shipped configs found"
        seen = set()
        for path in paths:
            cfg = ExperimentConfig.from_yaml(path.read_text())
            assert cfg.name == path.stem
            fp = cfg.fingerprint()
            assert fp not in seen
            seen.add(fp)


class TestRunManifest:
    def test_round_trip(self):
        m = RunManifest(config_fingerprint="abc123", wall_clock_seconds=1.5)
        m.stage_seconds["train"] = 1.5
        again = RunManifest.from_text(m.to_text())
        assert again == m

    def test_records_rng_algorithm(self):
        assert RunManifest(config_fingerprint="x").rng_algorithm == "PCG64"
