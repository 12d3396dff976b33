"""SVG figures from aggregated sweep results.

One figure per metric: regret on log-log axes (absolute values, floored,
since growth rates are the object of interest) and signed violation on a
log-x linear-y axis (it is expected to hover around zero for centered
constraints).  Lines are seed means, bands are seed min/max.
"""

from __future__ import annotations

import os
from collections import defaultdict

import numpy as np

from .metrics import prepare_metric


def _grouped(rows, metric):
    by_alg = defaultdict(lambda: defaultdict(list))
    for row in rows:
        by_alg[row["algorithm"]][row["T"]].append(row[metric])
    out = {}
    for alg, per_t in by_alg.items():
        horizons = sorted(per_t)
        values = [np.asarray(per_t[t], dtype=np.float64) for t in horizons]
        out[alg] = (np.array(horizons, dtype=np.float64), values)
    return out


def plot_sweep(rows, output_dir: str) -> list[str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(output_dir, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=(5, 4))
    for alg, (horizons, values) in sorted(_grouped(rows, "regret").items()):
        means = prepare_metric([float(np.mean(v)) for v in values])
        lows = prepare_metric([float(np.min(v)) for v in values])
        highs = prepare_metric([float(np.max(v)) for v in values])
        ax.plot(horizons, means, marker="o", label=alg)
        ax.fill_between(horizons, lows, highs, alpha=0.2)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("T")
    ax.set_ylabel("regret (|mean| over seeds)")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(output_dir, "regret.svg")
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(5, 4))
    for alg, (horizons, values) in sorted(_grouped(rows, "violation").items()):
        means = np.array([float(np.mean(v)) for v in values])
        lows = np.array([float(np.min(v)) for v in values])
        highs = np.array([float(np.max(v)) for v in values])
        ax.plot(horizons, means, marker="o", label=alg)
        ax.fill_between(horizons, lows, highs, alpha=0.2)
    ax.axhline(0.0, color="gray", linewidth=0.8)
    ax.set_xscale("log")
    ax.set_xlabel("T")
    ax.set_ylabel("violation (mean over seeds)")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(output_dir, "violation.svg")
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)
    return paths
