"""Batch experiment harness: seeded instances, solver comparison, aggregation.

A spec fixes one instance template (sizes, mean degree, probability
ranges), a grid of budget pairs, the algorithms to compare and a trial
count.  Trial i draws its instance from seed base_seed + i, so every
algorithm within a trial, and every budget row across trials, sees the
same graph and probabilities.  Each solver's reported strategy is
re-scored through the follower module before aggregation.

Workers: set STACKALLOC_THREADS > 1 to spread trials over processes;
per-trial seeding keeps the results identical to a sequential run.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, TextIO

import numpy as np

from . import exact, follower, heuristic, mwu
from .lp import PivotLimitError
from .model import BipartiteInfluenceGame, CapExceededError, MixedStrategy, generate_instance

ALGORITHMS = ("greedy", "mwu", "heuristic", "exact-multi-lp", "exact-disjoint-lp")
_ALIASES = {"exact": "exact-multi-lp", "exact-disjoint": "exact-disjoint-lp"}
CSV_HEADER = "dist,kL,kF,algorithm,mean,std,mean_ms,trials"


@dataclass(frozen=True)
class ExperimentSpec:
    n: int
    m: int
    mean_degree: float
    p_dist: tuple[float, float]
    pf_dist: tuple[float, float]
    budgets: tuple[tuple[int, int], ...]
    algorithms: tuple[str, ...]
    trials: int = 30
    base_seed: int = 0
    mwu_iterations: int = 100
    mwu_epsilon: float = 0.5
    heuristic_ell: int = 10

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for kl, kf in self.budgets:
            if not (0 <= kl <= self.n and 0 <= kf <= self.n):
                raise ValueError(f"budget pair ({kl}, {kf}) outside [0, n]")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {alg!r}")

    @property
    def dist_label(self) -> str:
        a, b = self.pf_dist
        return f"U({a:g},{b:g})"


def parse_spec(data: dict[str, Any]) -> ExperimentSpec:
    """Build a spec from its JSON form, normalizing algorithm aliases."""
    try:
        algorithms = tuple(_ALIASES.get(a, a) for a in data["algorithms"])
        mwu_cfg = data.get("mwu", {})
        heur_cfg = data.get("heuristic", {})
        return ExperimentSpec(
            n=int(data["n"]), m=int(data["m"]),
            mean_degree=float(data["mean_degree"]),
            p_dist=tuple(float(t) for t in data["p"]),
            pf_dist=tuple(float(t) for t in data["p_f"]),
            budgets=tuple((int(kl), int(kf)) for kl, kf in data["budgets"]),
            algorithms=algorithms,
            trials=int(data.get("trials", 30)),
            base_seed=int(data.get("base_seed", 0)),
            mwu_iterations=int(mwu_cfg.get("iterations", 100)),
            mwu_epsilon=float(mwu_cfg.get("epsilon", 0.5)),
            heuristic_ell=int(heur_cfg.get("ell", 10)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed experiment spec: {exc}") from exc


def parse_specs(data: dict[str, Any]) -> list[ExperimentSpec]:
    """Like parse_spec, but "p_f" may hold a list of ranges; one spec per
    range, so a single file can mirror a full results-table block."""
    pf = data.get("p_f")
    if isinstance(pf, (list, tuple)) and pf and isinstance(pf[0], (list, tuple)):
        return [parse_spec({**data, "p_f": one}) for one in pf]
    return [parse_spec(data)]


@dataclass(frozen=True)
class CellStats:
    """One algorithm's aggregate in one budget row."""

    mean: float | None
    std: float | None
    mean_ms: float | None
    trials_done: int
    values: tuple[float | None, ...]

    @property
    def skipped(self) -> bool:
        return self.trials_done == 0


@dataclass(frozen=True)
class ExperimentRow:
    dist: str
    k_L: int
    k_F: int
    cells: dict[str, CellStats]


def _solve_one(game: BipartiteInfluenceGame, alg: str,
               spec: ExperimentSpec) -> tuple[float, float]:
    """Run one solver; return its re-verified leader value and wall ms."""
    start = time.perf_counter()
    if alg == "greedy":
        z, _ = heuristic.greedy_baseline(game)
        x = MixedStrategy.point_mass(z)
    elif alg == "mwu":
        cfg = mwu.MwuConfig(iterations=spec.mwu_iterations, epsilon=spec.mwu_epsilon)
        x, _, _ = mwu.solve_mwu(game, cfg)
    elif alg == "heuristic":
        x, _ = heuristic.solve_heuristic(game, spec.heuristic_ell)
    elif alg == "exact-multi-lp":
        x = exact.solve_multi_lp(game).leader
    elif alg == "exact-disjoint-lp":
        x = exact.solve_disjoint_lp(game).leader
    else:  # pragma: no cover - spec validation rejects unknown names
        raise ValueError(alg)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    value = follower.best_response(game, x).leader_value
    return value, elapsed_ms


def _run_trial(payload: tuple[ExperimentSpec, int, int, int]
               ) -> dict[str, tuple[float, float] | None]:
    spec, k_L, k_F, trial = payload
    game = generate_instance(spec.n, spec.m, spec.mean_degree, spec.p_dist,
                             spec.pf_dist, seed=spec.base_seed + trial,
                             k_L=k_L, k_F=k_F)
    out: dict[str, tuple[float, float] | None] = {}
    for alg in spec.algorithms:
        try:
            out[alg] = _solve_one(game, alg, spec)
        except (CapExceededError, PivotLimitError, ValueError):
            out[alg] = None  # recorded as a skipped cell, never fatal
    return out


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("STACKALLOC_THREADS", "1")))
    except ValueError:
        return 1


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRow]:
    """Aggregate every (budgets, algorithm) cell over the trial seeds."""
    payloads = [(spec, kl, kf, t) for kl, kf in spec.budgets
                for t in range(spec.trials)]
    workers = worker_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial, payloads))
    else:
        results = [_run_trial(p) for p in payloads]

    rows = []
    for b, (kl, kf) in enumerate(spec.budgets):
        trial_results = results[b * spec.trials:(b + 1) * spec.trials]
        cells = {}
        for alg in spec.algorithms:
            pairs = [res[alg] for res in trial_results]
            values = tuple(p[0] if p else None for p in pairs)
            done = [p for p in pairs if p is not None]
            if done:
                vals = np.array([v for v, _ in done])
                cells[alg] = CellStats(mean=float(vals.mean()),
                                       std=float(vals.std()),
                                       mean_ms=float(np.mean([ms for _, ms in done])),
                                       trials_done=len(done), values=values)
            else:
                cells[alg] = CellStats(mean=None, std=None, mean_ms=None,
                                       trials_done=0, values=values)
        rows.append(ExperimentRow(dist=spec.dist_label, k_L=kl, k_F=kf, cells=cells))
    return rows


def write_csv(rows: list[ExperimentRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        for alg, cell in row.cells.items():
            if cell.skipped:
                writer.writerow([row.dist, row.k_L, row.k_F, alg, "skipped", "", "", 0])
            else:
                writer.writerow([row.dist, row.k_L, row.k_F, alg,
                                 f"{cell.mean:.6f}", f"{cell.std:.6f}",
                                 f"{cell.mean_ms:.3f}", cell.trials_done])


def rows_as_json(spec: ExperimentSpec, rows: list[ExperimentRow]) -> dict[str, Any]:
    """Full mirror of the CSV, including per-trial values."""
    return {
        "spec": {
            "n": spec.n, "m": spec.m, "mean_degree": spec.mean_degree,
            "p": list(spec.p_dist), "p_f": list(spec.pf_dist),
            "budgets": [list(b) for b in spec.budgets],
            "algorithms": list(spec.algorithms),
            "trials": spec.trials, "base_seed": spec.base_seed,
            "mwu": {"iterations": spec.mwu_iterations, "epsilon": spec.mwu_epsilon},
            "heuristic": {"ell": spec.heuristic_ell},
        },
        "rows": [
            {
                "dist": row.dist, "kL": row.k_L, "kF": row.k_F,
                "cells": {
                    alg: ({"status": "skipped"} if cell.skipped else {
                        "status": "ok", "mean": cell.mean, "std": cell.std,
                        "mean_ms": cell.mean_ms, "trials": cell.trials_done,
                        "values": list(cell.values),
                    })
                    for alg, cell in row.cells.items()
                },
            }
            for row in rows
        ],
    }
