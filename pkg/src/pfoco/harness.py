"""Sweep orchestration: configs to runs, summaries, and aggregate CSVs.

A *cell* is one (problem, algorithm, T, beta, seed) combination.  Every
random stream inside a cell is derived from its own key, so results do
not depend on scheduling order; sweeps run cells in a process pool capped
by the ``PFOCO_THREADS`` environment variable.

Config document (JSON):

    {
      "problem":   {"name": "matrix_completion", "m": 20, "n": 20,
                    "k": 2.0, "b": 40},
      "domain":    {"kind": "nuclear_ball"},          # optional, validated
      "algorithm": "meta-fw",                          # or "blocked", or list
      "oracle":    "ftpl",                             # "ocg" for blocked
      "T": 64,                                         # int or list
      "beta": 0.1,
      "seeds": [0, 1, 2],
      "output_dir": "out",
      "tape_path": null,                               # optional tape export
      "benchmark": {"n_iters": 60000, "tol": 0.05}     # optional override
    }

Parameters derived from (T, beta, bounds) are logged in summaries, never
taken from the config, so inconsistent combinations cannot be stated.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .blocked import derive_blocked_params, run_blocked
from .domains import Domain
from .meta_fw import derive_meta_fw_params, run_meta_fw
from .metrics import (RoundRecord, RunSummary, regret_curve, violation_curve,
                      write_records_csv)
from .ocg import ocg_factory
from .problems import PROBLEM_BUILDERS, benchmark_solve

ALGORITHM_CODES = {"blocked": 1, "meta-fw": 2}
DEFAULT_ORACLES = {"blocked": "ocg", "meta-fw": "ftpl"}

AGGREGATE_HEADER = ("algorithm,oracle,T,beta,seed,regret,violation,"
                    "cumulative_violation,sum_multiplier_sq,benchmark_gap,"
                    "benchmark_converged")


class ConfigError(ValueError):
    """Raised for malformed run/sweep configuration documents."""


@dataclass
class CellResult:
    summary: RunSummary
    records: list
    points: list | None
    x_star: np.ndarray
    domain: Domain


def build_problem(problem_cfg: dict, seed: int):
    try:
        name = problem_cfg["name"]
    except (KeyError, TypeError):
        raise ConfigError("problem config needs a 'name' key") from None
    try:
        builder = PROBLEM_BUILDERS[name]
    except KeyError:
        raise ConfigError(
            f"unknown problem {name!r}; known: {sorted(PROBLEM_BUILDERS)}"
        ) from None
    try:
        return builder(problem_cfg, seed)
    except KeyError as exc:
        raise ConfigError(f"problem {name!r} config missing key {exc}") from None


def check_domain_cfg(domain_cfg, instance) -> None:
    if domain_cfg is None:
        return
    kind = domain_cfg.get("kind")
    actual = instance.domain().kind
    if kind != actual:
        raise ConfigError(
            f"config domain kind {kind!r} does not match the problem's {actual!r}"
        )


def execute_cell(problem_cfg: dict, algorithm: str, horizon: int, beta: float,
                 seed: int, benchmark_cfg: dict | None = None,
                 keep_points: bool = False) -> CellResult:
    """Run one cell end to end: stream, algorithm, benchmark, summary."""
    if algorithm not in ALGORITHM_CODES:
        raise ConfigError(
            f"unknown algorithm {algorithm!r}; known: {sorted(ALGORITHM_CODES)}"
        )
    instance = build_problem(problem_cfg, seed)
    domain = instance.domain()
    bounds = instance.bounds()
    rounds = instance.rounds(horizon)
    alg_rng = np.random.default_rng([seed, horizon, ALGORITHM_CODES[algorithm]])

    start = time.perf_counter()
    if algorithm == "blocked":
        meta, factory = ocg_factory(domain)
        params = derive_blocked_params(horizon, meta, bounds, beta)
        log = run_blocked(rounds, domain, params, bounds, factory, alg_rng,
                          keep_points=keep_points)
    else:
        params = derive_meta_fw_params(horizon, bounds, beta)
        log = run_meta_fw(rounds, domain, params, alg_rng,
                          keep_points=keep_points)
    wall = time.perf_counter() - start

    bench_iters, bench_tol = instance.benchmark_defaults(horizon)
    if benchmark_cfg:
        bench_iters = int(benchmark_cfg.get("n_iters", bench_iters))
        bench_tol = float(benchmark_cfg.get("tol", bench_tol))
    bench_rng = np.random.default_rng([seed, horizon, 3])
    bench = benchmark_solve(instance.offline_objective(rounds), domain,
                            bench_iters, bench_tol, bench_rng)

    regret = regret_curve(log.records, bench.x, rounds)
    violation = violation_curve(log.records)
    clipped = violation_curve(log.records, clipped=True)
    summary = RunSummary(
        algorithm=algorithm,
        oracle=DEFAULT_ORACLES[algorithm],
        T=horizon,
        beta=beta,
        seed=seed,
        regret=float(regret[-1]),
        violation=float(violation[-1]),
        cumulative_violation=float(clipped[-1]),
        sum_multiplier_sq=float(np.sum(log.multipliers ** 2)),
        wall_time=wall,
        benchmark_gap=float(bench.gap),
        benchmark_converged=bool(bench.converged),
    )
    return CellResult(summary=summary, records=log.records, points=log.points,
                      x_star=bench.x, domain=domain)


def records_filename(algorithm: str, horizon: int, seed: int) -> str:
    return f"records_{algorithm}_T{horizon}_seed{seed}.csv"


def _worker(task: dict):
    result = execute_cell(task["problem"], task["algorithm"], task["T"],
                          task["beta"], task["seed"],
                          benchmark_cfg=task.get("benchmark"))
    path = os.path.join(task["output_dir"],
                        records_filename(task["algorithm"], task["T"],
                                         task["seed"]))
    write_records_csv(path, result.records)
    return result.summary


def pool_size(n_tasks: int) -> int:
    cap = os.environ.get("PFOCO_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_tasks, limit))


def _as_list(value):
    return value if isinstance(value, list) else [value]


def validate_config(cfg: dict, sweep: bool) -> dict:
    for key in ("problem", "algorithm", "T", "beta", "seeds", "output_dir"):
        if key not in cfg:
            raise ConfigError(f"config missing required key {key!r}")
    algorithms = _as_list(cfg["algorithm"])
    horizons = _as_list(cfg["T"])
    for alg in algorithms:
        if alg not in ALGORITHM_CODES:
            raise ConfigError(f"unknown algorithm {alg!r}")
    for horizon in horizons:
        if not isinstance(horizon, int) or horizon < 4:
            raise ConfigError(f"T must be an integer >= 4, got {horizon!r}")
    if not sweep and (len(algorithms) > 1 or len(horizons) > 1):
        raise ConfigError("'run' takes a single algorithm and a single T; "
                          "use 'sweep' for grids")
    if not isinstance(cfg["seeds"], list) or not cfg["seeds"]:
        raise ConfigError("'seeds' must be a non-empty list of integers")
    return cfg


def run_single(cfg: dict) -> tuple[str, str]:
    """Execute the first seed of a config; returns (records_path, summary_path)."""
    cfg = validate_config(cfg, sweep=False)
    seed = cfg["seeds"][0]
    algorithm = _as_list(cfg["algorithm"])[0]
    horizon = _as_list(cfg["T"])[0]
    instance = build_problem(cfg["problem"], seed)
    check_domain_cfg(cfg.get("domain"), instance)

    result = execute_cell(cfg["problem"], algorithm, horizon, cfg["beta"], seed,
                          benchmark_cfg=cfg.get("benchmark"))
    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    records_path = os.path.join(out, "records.csv")
    summary_path = os.path.join(out, "summary.json")
    write_records_csv(records_path, result.records)
    with open(summary_path, "w") as fh:
        fh.write(result.summary.to_json() + "\n")

    if cfg.get("tape_path"):
        from .tape import write_tape

        write_tape(cfg["tape_path"], instance, instance.rounds(horizon))
    return records_path, summary_path


def run_sweep(cfg: dict) -> str:
    """Execute the full (algorithm x T x seed) grid; returns the aggregate path."""
    cfg = validate_config(cfg, sweep=True)
    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    instance = build_problem(cfg["problem"], cfg["seeds"][0])
    check_domain_cfg(cfg.get("domain"), instance)

    tasks = [
        {"problem": cfg["problem"], "algorithm": alg, "T": horizon,
         "beta": cfg["beta"], "seed": seed, "benchmark": cfg.get("benchmark"),
         "output_dir": out}
        for alg in _as_list(cfg["algorithm"])
        for horizon in _as_list(cfg["T"])
        for seed in cfg["seeds"]
    ]
    workers = pool_size(len(tasks))
    if workers == 1:
        summaries = [_worker(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_worker, tasks))

    summaries.sort(key=lambda s: (s.algorithm, s.T, s.seed))
    return write_aggregate(os.path.join(out, "sweep.csv"), summaries)


def write_aggregate(path: str, summaries) -> str:
    from .metrics import format_float as ff

    lines = [AGGREGATE_HEADER]
    for s in summaries:
        lines.append(
            f"{s.algorithm},{s.oracle},{s.T},{ff(s.beta)},{s.seed},"
            f"{ff(s.regret)},{ff(s.violation)},{ff(s.cumulative_violation)},"
            f"{ff(s.sum_multiplier_sq)},{ff(s.benchmark_gap)},"
            f"{int(s.benchmark_converged)}"
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_aggregate(path: str) -> list[dict]:
    with open(path, "r", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != AGGREGATE_HEADER:
        raise ValueError(f"unexpected aggregate header in {path}")
    rows = []
    for line in lines[1:]:
        (alg, oracle, horizon, beta, seed, regret, violation, clipped,
         lam_sq, gap, converged) = line.split(",")
        rows.append({
            "algorithm": alg, "oracle": oracle, "T": int(horizon),
            "beta": float(beta), "seed": int(seed), "regret": float(regret),
            "violation": float(violation),
            "cumulative_violation": float(clipped),
            "sum_multiplier_sq": float(lam_sq), "benchmark_gap": float(gap),
            "benchmark_converged": bool(int(converged)),
        })
    return rows
