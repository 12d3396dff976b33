"""Regret/violation accounting, run records, and slope-fit tooling.

The per-round record keeps only scalars plus a digest of the decision so
that full runs stay cheap to store while remaining byte-reproducible; the
records CSV schema is fixed: header ``t,f_val,g_val,lambda,x_hash``,
floats printed with 17 significant digits, Unix newlines.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

CSV_HEADER = "t,f_val,g_val,lambda,x_hash"


def point_hash(x: np.ndarray) -> str:
    """16-hex-char digest of the exact float64 bytes of a decision."""
    return hashlib.sha256(np.ascontiguousarray(x, dtype=np.float64).tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class RoundRecord:
    t: int
    f_val: float
    g_val: float
    multiplier: float
    x_hash: str


@dataclass
class RunSummary:
    algorithm: str
    oracle: str
    T: int
    beta: float
    seed: int
    regret: float
    violation: float
    cumulative_violation: float
    sum_multiplier_sq: float
    wall_time: float
    benchmark_gap: float
    benchmark_converged: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def regret_curve(records, x_star: np.ndarray, rounds) -> np.ndarray:
    """Prefix sums of f_t(x_t) - f_t(x_star) over the replayed rounds."""
    if len(records) != len(rounds):
        raise ValueError(
            f"record/round length mismatch: {len(records)} vs {len(rounds)}"
        )
    gaps = np.empty(len(records))
    for i, (rec, rf) in enumerate(zip(records, rounds)):
        star_val, _ = rf.f(x_star)
        gaps[i] = rec.f_val - star_val
    return np.cumsum(gaps)


def violation_curve(records, clipped: bool = False) -> np.ndarray:
    """Prefix sums of g_t(x_t); ``clipped`` replaces each term by max(g, 0)."""
    vals = np.array([rec.g_val for rec in records])
    if clipped:
        vals = np.maximum(vals, 0.0)
    return np.cumsum(vals)


def slope_fit(horizons, values) -> tuple[float, float]:
    """Least-squares slope and r^2 of log(value) against log(horizon).

    Requires at least 3 distinct horizons and strictly positive values
    (apply :func:`prepare_metric` first for signed metrics).
    """
    horizons = np.asarray(horizons, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if len(np.unique(horizons)) < 3:
        raise ValueError("slope fit needs at least 3 distinct horizon values")
    if np.any(values <= 0.0):
        raise ValueError("slope fit needs positive metric values")
    lx = np.log(horizons)
    ly = np.log(values)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def prepare_metric(values, floor: float = 1e-6) -> np.ndarray:
    """Absolute values floored at ``floor`` so signed metrics can be log-fit."""
    return np.maximum(np.abs(np.asarray(values, dtype=np.float64)), floor)


def violation_slope_policy(horizons, mean_violations, floor: float = 1e-6):
    """Growth-rate report for a signed violation metric.

    Returns ``("slope", slope, r2)`` when the seed-mean violation is
    positive at every horizon; otherwise the one-sided bound holds
    trivially and ``("vacuous", message)`` is returned.
    """
    means = np.asarray(mean_violations, dtype=np.float64)
    if np.all(means > 0.0):
        slope, r2 = slope_fit(horizons, prepare_metric(means, floor))
        return ("slope", slope, r2)
    return ("vacuous", "violation non-positive -- bound vacuously satisfied")


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_records_csv(path, records) -> None:
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(
            f"{rec.t},{format_float(rec.f_val)},{format_float(rec.g_val)},"
            f"{format_float(rec.multiplier)},{rec.x_hash}"
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_records_csv(path) -> list[RoundRecord]:
    with open(path, "r", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected records CSV header in {path}")
    records = []
    for line in lines[1:]:
        t, f_val, g_val, lam, x_hash = line.split(",")
        records.append(RoundRecord(int(t), float(f_val), float(g_val),
                                   float(lam), x_hash))
    return records
