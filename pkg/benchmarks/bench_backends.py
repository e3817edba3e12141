#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the same GBM training workload twice in fresh subprocesses — once
with the default backend and once with ``TSGBM_DISABLE_NUMBA=1`` — and
reports wall-clock times plus a checksum of the trained model so the two
backends can be confirmed bit-identical.

Usage:
    python3 benchmarks/bench_backends.py [--rows 20000] [--iterations 200]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import dataclasses
import hashlib
import json
import sys
import time

import numpy as np

from tsgbm.backend import backend_name
from tsgbm.gbm import GbmParams, LossSpec, fit_gbm

rows, cols, iterations, seed = json.loads(sys.argv[1])

rng = np.random.default_rng(seed)
X = rng.standard_normal((rows, cols))
y = np.sin(X[:, 0]) + 0.5 * X[:, 1] * X[:, 2] + 0.1 * rng.standard_normal(rows)

params = GbmParams(
    learning_rate=0.1,
    iterations=iterations,
    max_depth=5,
    num_leaves=16,
    bagging_fraction=1.0,
    min_data_in_leaf=20,
    l1_regularization=1e-4,
    histogram_bins=255,
)

# Warm-up run compiles the numba kernels so the timed run measures
# steady-state throughput, not JIT compilation.
warmup = dataclasses.replace(params, iterations=5)
fit_gbm(X[:200], y[:200], warmup, LossSpec("squared"), seed)

t0 = time.perf_counter()
model = fit_gbm(X, y, params, LossSpec("squared"), seed)
elapsed = time.perf_counter() - t0

pred = model.predict(X)
digest = hashlib.sha256(pred.tobytes()).hexdigest()[:16]
print(json.dumps({
    "backend": backend_name(),
    "seconds": elapsed,
    "trees": len(model.trees),
    "prediction_sha256": digest,
}))
"""


def _run(disable_numba: bool, rows: int, cols: int, iterations: int, seed: int) -> dict:
    env = dict(os.environ)
    if disable_numba:
        env["TSGBM_DISABLE_NUMBA"] = "1"
    else:
        env.pop("TSGBM_DISABLE_NUMBA", None)
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, json.dumps([rows, cols, iterations, seed])],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--cols", type=int, default=20)
    ap.add_argument("--iterations", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    results = [
        _run(False, args.rows, args.cols, args.iterations, args.seed),
        _run(True, args.rows, args.cols, args.iterations, args.seed),
    ]
    for r in results:
        print(f"{r['backend']:>6}: {r['seconds']:8.3f}s  "
              f"trees={r['trees']}  sha256={r['prediction_sha256']}")
    fast, slow = sorted(r["seconds"] for r in results)
    print(f"speedup: {slow / fast:.2f}x")
    if results[0]["prediction_sha256"] != results[1]["prediction_sha256"]:
        print("WARNING: backends disagree — predictions are not bit-identical")
        sys.exit(1)
    print("backends bit-identical: yes")


if __name__ == "__main__":
    main()
