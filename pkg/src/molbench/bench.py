"""Benchmark orchestration: the five-repetition protocol and the timing
benchmark.

Repetitions run sequentially with a shared evaluation cache (later
repetitions get cheaper on duplicate proposals; values never change, so
traces stay reproducible).  Each repetition gets a fresh proposal budget and
the seed offset ``base_seed + rep``.
"""

from __future__ import annotations

import os
import time
from pathlib import Path
from typing import Optional, Sequence

from .datasets import DatasetHandle, rank_seeds
from .descriptors import diversity_from_fingerprints
from .optimizers import (
    GaConfig,
    MarkovHcConfig,
    RunTrace,
    precondition_ga,
    precondition_markov,
    run_ga,
    run_markov_hc,
    sample_unique_ga,
    sample_unique_markov,
)
from .providers import CACHE_DIR_ENV, Budget, Evaluator, Provider
from .reports import RunReport, TimingRow, mean_sd
from .tasks import TaskDefinition

OPTIMIZERS = ("ga", "markov-hc")


def run_benchmark(
    task: TaskDefinition,
    optimizer: str,
    dataset: DatasetHandle,
    provider: Provider,
    seed: int,
    repetitions: int = 5,
    budget_proposals: int = 5_000,
    max_wall_seconds: float = 86_400.0,
    population_size: Optional[int] = None,
    iterations: Optional[int] = None,
    out_dir: Optional[str | Path] = None,
    csv: bool = False,
    workers: int = 1,
    count_duplicates: bool = True,
    store_path: Optional[str | Path] = None,
) -> tuple[RunReport, list[RunTrace]]:
    if optimizer not in OPTIMIZERS:
        raise ValueError(f"unknown optimizer {optimizer!r}; choose from {OPTIMIZERS}")
    population = population_size or task.population_size
    rounds = iterations if iterations is not None else task.iterations

    if store_path is None and os.environ.get(CACHE_DIR_ENV):
        cache_dir = Path(os.environ[CACHE_DIR_ENV])
        cache_dir.mkdir(parents=True, exist_ok=True)
        store_path = cache_dir / f"{task.name}.records.jsonl"

    evaluator = Evaluator(
        provider,
        Budget(max_proposals=budget_proposals, max_wall_seconds=max_wall_seconds),
        store_path=store_path,
        workers=workers,
        count_duplicates=count_duplicates,
    )
    seeds = rank_seeds(dataset, task)

    traces: list[RunTrace] = []
    per_best: list[float] = []
    per_proposals: list[int] = []
    per_success: list[float] = []
    per_diversity: list[Optional[float]] = []
    best_keys: list[str] = []
    walls: list[float] = []

    for rep in range(repetitions):
        budget = Budget(max_proposals=budget_proposals, max_wall_seconds=max_wall_seconds)
        started = time.perf_counter()
        if optimizer == "ga":
            cfg = GaConfig(
                population_size=population,
                iterations=rounds,
                rng_seed=seed + rep,
            )
            trace = run_ga(
                task, seeds, provider, budget, cfg,
                evaluator=evaluator, collect_fingerprints=True,
            )
        else:
            cfg = MarkovHcConfig(
                population_size=population,
                iterations=rounds,
                rng_seed=seed + rep,
            )
            trace = run_markov_hc(
                task, seeds, provider, budget, cfg,
                evaluator=evaluator, collect_fingerprints=True,
            )
        walls.append(time.perf_counter() - started)
        traces.append(trace)
        per_best.append(trace.best_fitness)
        per_proposals.append(trace.n_proposals)
        per_success.append(
            trace.constraint_passes / trace.n_proposals if trace.n_proposals else 0.0
        )
        if len(trace.fingerprints) >= 2:
            per_diversity.append(diversity_from_fingerprints(trace.fingerprints))
        else:
            per_diversity.append(None)
        best_keys.append(trace.best_key)
        trace.fingerprints = []  # free memory; diversity already folded in

    report = RunReport(
        task=task.name,
        optimizer=optimizer,
        repetitions=repetitions,
        base_seed=seed,
        budget_per_rep=budget_proposals,
        per_rep_best=per_best,
        per_rep_proposals=per_proposals,
        per_rep_success=per_success,
        per_rep_diversity=per_diversity,
        best_keys=best_keys,
        wall_seconds=walls,
    )
    if out_dir is not None:
        report.write(out_dir, csv=csv)
        out = Path(out_dir)
        for rep, trace in enumerate(traces):
            (out / f"trace_rep{rep}.tsv").write_text(
                "\n".join(trace.to_lines()) + "\n"
            )
    evaluator.close()
    return report, traces


def run_timing(
    dataset: DatasetHandle,
    optimizers: Sequence[str] = OPTIMIZERS,
    n_unique: int = 10_000,
    repetitions: int = 5,
    seed: int = 0,
) -> list[TimingRow]:
    """Wall-clock for pre-conditioning and for proposing ``n_unique``
    structures under a constant dummy fitness, repeated and aggregated."""
    rows: list[TimingRow] = []
    for name in optimizers:
        pre_times: list[float] = []
        sample_times: list[float] = []
        unique_counts: set[int] = set()
        for rep in range(repetitions):
            if name == "ga":
                pre, members = precondition_ga(dataset.molecules)
                cfg = GaConfig(population_size=n_unique, iterations=1, rng_seed=seed + rep)
                elapsed, keys = sample_unique_ga(members, n_unique, cfg, seed + rep)
            elif name == "markov-hc":
                cfg = MarkovHcConfig(rng_seed=seed + rep)
                pre, (model, members) = precondition_markov(dataset.molecules, cfg)
                elapsed, keys = sample_unique_markov(model, members, n_unique, cfg, seed + rep)
            else:
                raise ValueError(f"unknown optimizer {name!r}")
            pre_times.append(pre)
            sample_times.append(elapsed)
            unique_counts.add(len(keys))
        pre_mean, pre_sd = mean_sd(pre_times)
        samp_mean, samp_sd = mean_sd(sample_times)
        rows.append(
            TimingRow(
                optimizer=name,
                precondition_mean=pre_mean,
                precondition_sd=pre_sd,
                sample_mean=samp_mean,
                sample_sd=samp_sd,
                n_unique=max(unique_counts),
            )
        )
    return rows
