"""Seed x algorithm experiment orchestration and CSV emission."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .algorithms import make_algorithm
from .config import ExperimentConfig
from .embedding import sub_seed
from .simulator import CSV_COLUMNS, MetricsSeries, SimulationResult, fmt, run
from .substrate import SubstrateNetwork, generate_substrate
from .workload import VirtualRequest, dump_workload, generate_workload, load_workload

log = logging.getLogger(__name__)

METRICS = CSV_COLUMNS[1:]

# Reference end-of-run levels reported for MP-VNE, as (low, high, tolerance).
# Tolerance is absolute for acceptance and relative for cost and delay.
REFERENCE_BANDS = {
    "acceptance_rate": (0.60, 0.60, 0.15),
    "avg_cost": (650.0, 750.0, 0.25),
    "avg_delay": (460.0, 460.0, 0.25),
}

_SUBSTRATE, _WORKLOAD, _ALGORITHM = 1, 2, 3


def build_substrate(cfg: ExperimentConfig, seed: int) -> SubstrateNetwork:
    return generate_substrate(replace(cfg.generation, rng_seed=sub_seed(seed, _SUBSTRATE)))


def build_workload(cfg: ExperimentConfig, seed: int, domains: Sequence[int]) -> list[VirtualRequest]:
    wcfg = replace(cfg.workload, horizon=cfg.horizon, rng_seed=sub_seed(seed, _WORKLOAD))
    return generate_workload(wcfg, domains)


def run_single(
    cfg: ExperimentConfig,
    algorithm: str,
    seed: int,
    workload: list[VirtualRequest] | None = None,
) -> SimulationResult:
    net = build_substrate(cfg, seed)
    if workload is None:
        workload = build_workload(cfg, seed, net.domains)
    alg = make_algorithm(algorithm, cfg.swarm, sub_seed(seed, _ALGORITHM))
    return run(net, workload, alg, sampling=cfg.sampling, horizon=cfg.horizon, weights=cfg.weights)


def run_name(algorithm: str, seed: int) -> str:
    return f"{algorithm}_seed{seed}"


def _job(args) -> tuple[str, int, MetricsSeries]:
    cfg, algorithm, seed, workload, out = args
    res = run_single(cfg, algorithm, seed, workload)
    name = run_name(algorithm, seed)
    res.metrics.write_csv(out / f"{name}.csv")
    res.write_events(out / f"{name}.events.jsonl")
    return algorithm, seed, res.metrics


@dataclass
class ExperimentReport:
    out: Path
    runs: dict[tuple[str, int], MetricsSeries]
    summary_path: Path
    diagnostics: dict


def _mean_std(values: list[float]) -> tuple[float, float]:
    arr = np.array([v for v in values if not math.isnan(v)], dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    return float(arr.mean()), float(arr.std())


def write_summary(path: Path, runs: dict[tuple[str, int], MetricsSeries], algorithms: Sequence[str]) -> None:
    header = ["algorithm", "time"] + [f"{m}_{s}" for m in METRICS for s in ("mean", "std")]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for alg in algorithms:
            series = [ms for (a, _), ms in sorted(runs.items()) if a == alg]
            if not series:
                continue
            for i, t in enumerate(series[0].time):
                row = [alg, fmt(t)]
                for m in METRICS:
                    mean, std = _mean_std([getattr(s, m)[i] for s in series])
                    row += [fmt(mean), fmt(std)]
                w.writerow(row)


def band_diagnostics(runs: dict[tuple[str, int], MetricsSeries]) -> dict:
    """End-of-run MP-VNE means against the reference bands (reported, not gated)."""
    end = [ms.last() for (a, _), ms in runs.items() if a == "mp-vne"]
    if not end:
        return {}
    out = {}
    for metric, (lo, hi, tol) in REFERENCE_BANDS.items():
        value, _ = _mean_std([e[metric] for e in end])
        if metric == "acceptance_rate":
            low, high = lo - tol, hi + tol
        else:
            low, high = lo * (1 - tol), hi * (1 + tol)
        out[metric] = {
            "value": value,
            "band": [low, high],
            "within": bool(low <= value <= high) if not math.isnan(value) else False,
        }
    return out


def run_experiment(
    cfg: ExperimentConfig,
    jobs: int = 1,
    replay: list[VirtualRequest] | None = None,
) -> ExperimentReport:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(cfg, a, s, replay, out) for a in cfg.algorithms for s in cfg.seeds]
    runs: dict[tuple[str, int], MetricsSeries] = {}
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for alg, seed, ms in pool.map(_job, tasks):
                runs[(alg, seed)] = ms
    else:
        for t in tasks:
            alg, seed, ms = _job(t)
            runs[(alg, seed)] = ms
            log.info("finished %s", run_name(alg, seed))
    summary = out / "summary.csv"
    write_summary(summary, runs, cfg.algorithms)
    diag = band_diagnostics(runs)
    if diag:
        (out / "diagnostics.json").write_text(json.dumps(diag, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        for metric, d in diag.items():
            log.info(
                "mp-vne end-of-run %s = %.4f (reference band %.2f..%.2f, %s)",
                metric,
                d["value"],
                d["band"][0],
                d["band"][1],
                "within" if d["within"] else "outside",
            )
    return ExperimentReport(out, runs, summary, diag)


def dump_topology(cfg: ExperimentConfig, path: str | Path, seed: int | None = None) -> SubstrateNetwork:
    net = build_substrate(cfg, cfg.seeds[0] if seed is None else seed)
    Path(path).write_text(net.to_dot(), encoding="utf-8")
    return net


def dump_seed_workload(cfg: ExperimentConfig, path: str | Path, seed: int | None = None) -> list[VirtualRequest]:
    seed = cfg.seeds[0] if seed is None else seed
    net = build_substrate(cfg, seed)
    wl = build_workload(cfg, seed, net.domains)
    dump_workload(path, wl)
    return wl


__all__ = [
    "ExperimentReport",
    "band_diagnostics",
    "build_substrate",
    "build_workload",
    "dump_seed_workload",
    "dump_topology",
    "load_workload",
    "run_experiment",
    "run_single",
]
