#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Two layers:

* kernel level -- times ``top_singular_pair`` and the coordinate LMOs for
  both backends in-process and reports the speedup plus the numerical
  agreement of the results;
* end-to-end -- runs one matrix-completion cell per backend in a
  subprocess (the backend is chosen at import time via the
  ``PFOCO_PURE_PYTHON`` environment variable) and compares wall time and
  the resulting regret.

Usage: python benchmarks/bench_kernels.py [--sizes 8 20 50] [--repeats 200]
"""

import argparse
import importlib
import json
import os
import subprocess
import sys
import time

import numpy as np

END_TO_END_SNIPPET = """
import json, time
from pfoco import kernel_backend
from pfoco.harness import execute_cell

t0 = time.perf_counter()
cell = execute_cell({"name": "matrix_completion", "m": 20, "n": 20,
                     "k": 2.0, "b": 40}, "meta-fw", 64, 0.1, 0)
print(json.dumps({"backend": kernel_backend,
                  "seconds": time.perf_counter() - t0,
                  "regret": cell.summary.regret}))
"""


def time_callable(fn, repeats):
    best = float("inf")
    for _ in range(max(1, repeats // 20)):
        t0 = time.perf_counter()
        for _ in range(20):
            fn()
        best = min(best, (time.perf_counter() - t0) / 20)
    return best


def bench_kernels(sizes, repeats):
    fallback = importlib.import_module("pfoco._kernels._fallback")
    try:
        core = importlib.import_module("pfoco._kernels._core")
    except ImportError:
        print("compiled core not available; kernel comparison skipped")
        return

    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'compiled':>12}{'fallback':>12}{'speedup':>9}")
    for n in sizes:
        mat = rng.standard_normal((n, n))
        v0 = rng.standard_normal(n)
        t_core = time_callable(lambda: core.top_singular_pair(mat, v0, 200, 1e-12),
                               repeats)
        t_fall = time_callable(
            lambda: fallback.top_singular_pair(mat, v0, 200, 1e-12), repeats)
        s_core = core.top_singular_pair(mat, v0, 200, 1e-12)[2]
        s_fall = fallback.top_singular_pair(mat, v0, 200, 1e-12)[2]
        agree = abs(s_core - s_fall) / max(s_core, 1e-12)
        print(f"{f'top_singular_pair {n}x{n}':<28}{t_core * 1e6:>10.1f}us"
              f"{t_fall * 1e6:>10.1f}us{t_fall / t_core:>8.1f}x"
              f"   (sigma rel diff {agree:.1e})")

    w = rng.standard_normal(100_000)
    lo, hi = -np.ones(100_000), np.ones(100_000)
    for name, c_fn, f_fn in (
        ("box_lmo d=1e5", lambda: core.box_lmo(w, lo, hi),
         lambda: fallback.box_lmo(w, lo, hi)),
        ("l1_ball_lmo d=1e5", lambda: core.l1_ball_lmo(w, 1.0),
         lambda: fallback.l1_ball_lmo(w, 1.0)),
    ):
        t_core = time_callable(c_fn, repeats)
        t_fall = time_callable(f_fn, repeats)
        print(f"{name:<28}{t_core * 1e6:>10.1f}us{t_fall * 1e6:>10.1f}us"
              f"{t_fall / t_core:>8.1f}x")


def bench_end_to_end():
    print("\nend-to-end (matrix completion 20x20, meta-fw, T=64):")
    rows = []
    for pure in ("", "1"):
        env = dict(os.environ)
        env.pop("PFOCO_PURE_PYTHON", None)
        if pure:
            env["PFOCO_PURE_PYTHON"] = pure
        out = subprocess.run([sys.executable, "-c", END_TO_END_SNIPPET],
                             capture_output=True, text=True, env=env,
                             check=True)
        rows.append(json.loads(out.stdout.strip().splitlines()[-1]))
    for row in rows:
        print(f"  {row['backend']:<8} {row['seconds']:7.3f}s   "
              f"regret {row['regret']:.6f}")
    if len({row["backend"] for row in rows}) == 2:
        fast = min(rows, key=lambda r: r["seconds"])
        slow = max(rows, key=lambda r: r["seconds"])
        drift = abs(rows[0]["regret"] - rows[1]["regret"])
        print(f"  speedup {slow['seconds'] / fast['seconds']:.1f}x "
              f"({fast['backend']} faster); regret drift {drift:.2e}")
    else:
        print("  (compiled core unavailable; both runs used the fallback)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 20, 50])
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    bench_kernels(args.sizes, args.repeats)
    bench_end_to_end()


if __name__ == "__main__":
    main()
