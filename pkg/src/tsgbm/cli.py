"""Command-line surface: simulate | train | evaluate | scatter | crlb.

Every command is driven by a config file and a master seed; outputs are
plot-ready CSV files (17 significant digits, dot decimal separator) plus
a JSON run manifest.  Each CSV carries the config fingerprint as a
comment line so outputs are traceable to the exact configuration.
Progress goes to standard error; standard output carries one JSON summary
line per command.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, RunManifest
from .core import ConfigError, DomainError, ParameterVector
from .pipeline import (
    TsgbmEstimator,
    evaluate_mse,
    scatter_eval,
    train_tsgbm,
    weibull_crlb,
)
from .simulators import simulate

ESTIMATOR_FILENAME = "estimator.json"
MANIFEST_FILENAME = "manifest.json"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, fingerprint: str, header: list[str], rows) -> None:
    lines = [f"# config {fingerprint}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_config(path: str) -> ExperimentConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    return ExperimentConfig.from_yaml(p.read_text(encoding="utf-8"))


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _get_estimator(cfg: ExperimentConfig, seed: int, threads: int, out: Path) -> TsgbmEstimator:
    model_path = out / ESTIMATOR_FILENAME
    if model_path.exists():
        _progress(f"loading estimator from {model_path}")
        return TsgbmEstimator.from_text(model_path.read_text(encoding="utf-8"))
    _progress(
        f"training estimator: M_train={cfg.M_train}, "
        f"{cfg.mechanism.kind} N={cfg.mechanism.N}, loss={cfg.loss.kind}"
    )
    est = train_tsgbm(
        cfg.mechanism,
        cfg.prior,
        cfg.compressor,
        cfg.feature_degree,
        cfg.gbm,
        cfg.loss,
        cfg.M_train,
        seed,
        threads=threads,
    )
    model_path.write_text(est.to_text(), encoding="utf-8")
    _progress(f"estimator written to {model_path}")
    return est


def cmd_simulate(cfg: ExperimentConfig, seed: int, threads: int, out: Path) -> dict:
    if not cfg.theta_test:
        raise ConfigError("simulate needs at least one theta_test row")
    files = []
    for i, theta in enumerate(cfg.theta_test):
        y = simulate(cfg.mechanism, np.asarray(theta), seed + i)
        path = out / f"sequence_{i}.csv"
        header = [
            f"# mechanism {cfg.mechanism.kind} N={cfg.mechanism.N} "
            f"theta={list(theta)} seed={seed + i}",
            "y",
        ]
        lines = [f"# config {cfg.fingerprint()}"] + header
        lines += [_fmt(v) for v in y.samples]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        files.append(str(path))
    return {"files": files}


def cmd_train(cfg: ExperimentConfig, seed: int, threads: int, out: Path) -> dict:
    est = _get_estimator(cfg, seed, threads, out)
    curves = [float(m.train_loss_curve[-1]) for m in est.models]
    return {
        "estimator": str(out / ESTIMATOR_FILENAME),
        "final_train_loss": curves,
        "trees": [len(m.trees) for m in est.models],
    }


def cmd_evaluate(cfg: ExperimentConfig, seed: int, threads: int, out: Path) -> dict:
    if not cfg.theta_test:
        raise ConfigError("evaluate needs at least one theta_test row")
    est = _get_estimator(cfg, seed, threads, out)
    names = list(est.param_names)
    is_weibull = cfg.mechanism.kind == "weibull"
    header = names + [f"mse_{n}" for n in names]
    if is_weibull:
        header += [f"crlb_{n}" for n in names]
    rows = []
    for i, theta in enumerate(cfg.theta_test):
        _progress(f"evaluating theta={list(theta)} (MC={cfg.MC})")
        report = evaluate_mse(
            est,
            ParameterVector(np.asarray(theta), tuple(names)),
            cfg.MC,
            seed + 1 + i,
            threads=threads,
        )
        row = [float(v) for v in theta] + [float(v) for v in report.mse]
        if is_weibull:
            row += list(weibull_crlb(theta[0], theta[1], cfg.mechanism.N))
        rows.append(row)
    path = out / "mse_table.csv"
    _write_csv(path, cfg.fingerprint(), header, rows)
    return {"mse_table": str(path), "rows": len(rows)}


def cmd_scatter(cfg: ExperimentConfig, seed: int, threads: int, out: Path) -> dict:
    est = _get_estimator(cfg, seed, threads, out)
    _progress(f"scatter evaluation over M_test={cfg.M_test} fresh draws")
    truths, estimates = scatter_eval(est, cfg.prior, cfg.M_test, seed + 1, threads=threads)
    names = list(est.param_names)
    header = [f"true_{n}" for n in names] + [f"est_{n}" for n in names]
    rows = [
        [float(v) for v in truths[i]] + [float(v) for v in estimates[i]]
        for i in range(truths.shape[0])
    ]
    path = out / "scatter.csv"
    _write_csv(path, cfg.fingerprint(), header, rows)
    return {"scatter": str(path), "rows": len(rows)}


def cmd_crlb(cfg: ExperimentConfig, seed: int, threads: int, out: Path) -> dict:
    if cfg.mechanism.kind != "weibull":
        raise ConfigError("crlb is only defined for the weibull mechanism")
    if not cfg.theta_test:
        raise ConfigError("crlb needs at least one theta_test row")
    rows = []
    for theta in cfg.theta_test:
        ce, cg = weibull_crlb(theta[0], theta[1], cfg.mechanism.N)
        rows.append([float(theta[0]), float(theta[1]), ce, cg])
    path = out / "crlb_table.csv"
    _write_csv(path, cfg.fingerprint(), ["eta", "gamma", "crlb_eta", "crlb_gamma"], rows)
    return {"crlb_table": str(path), "rows": len(rows)}


_COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "scatter": cmd_scatter,
    "crlb": cmd_crlb,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsgbm",
        description="Two-stage gradient-boosted minimax parameter estimation",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="experiment config (YAML)")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--threads", type=int, default=1, help="worker thread cap")
    parser.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        seed = cfg.master_seed if args.seed is None else args.seed
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        out = Path(args.out) if args.out else Path("runs") / cfg.name
        out.mkdir(parents=True, exist_ok=True)
        start = time.monotonic()
        result = _COMMANDS[args.command](cfg, seed, args.threads, out)
        manifest = RunManifest(config_fingerprint=cfg.fingerprint())
        manifest.wall_clock_seconds = time.monotonic() - start
        manifest.stage_seconds[args.command] = manifest.wall_clock_seconds
        (out / MANIFEST_FILENAME).write_text(manifest.to_text(), encoding="utf-8")
        summary = {"command": args.command, "config": cfg.fingerprint(), **result}
        print(json.dumps(summary))
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"runtime error ({args.command}): {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
