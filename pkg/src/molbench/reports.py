"""Run reports: per-repetition bests, aggregates, success rate, diversity.

The machine-readable report is line-delimited JSON with sorted keys and no
timing fields, so identical invocations produce byte-identical files; wall
times and timestamps go to a sidecar meta file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence


def mean_sd(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (ddof=1; 0.0 for a single value)."""
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


@dataclass
class RunReport:
    task: str
    optimizer: str
    repetitions: int
    base_seed: int
    budget_per_rep: int
    per_rep_best: list[float]
    per_rep_proposals: list[int]
    per_rep_success: list[float]
    per_rep_diversity: list[Optional[float]]
    best_keys: list[str]
    wall_seconds: list[float] = field(default_factory=list)  # meta only

    @property
    def best_mean_sd(self) -> tuple[float, float]:
        return mean_sd(self.per_rep_best)

    @property
    def success_rate(self) -> float:
        total = sum(self.per_rep_proposals)
        if total == 0:
            return 0.0
        weighted = sum(
            s * n for s, n in zip(self.per_rep_success, self.per_rep_proposals)
        )
        return weighted / total

    @property
    def diversity_mean_sd(self) -> Optional[tuple[float, float]]:
        values = [d for d in self.per_rep_diversity if d is not None]
        if not values:
            return None
        return mean_sd(values)

    # -- serialization ---------------------------------------------------

    def to_json_lines(self) -> str:
        best_mean, best_sd = self.best_mean_sd
        div = self.diversity_mean_sd
        header = {
            "kind": "run_report",
            "version": 1,
            "task": self.task,
            "optimizer": self.optimizer,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "budget_per_rep": self.budget_per_rep,
            "best_mean": best_mean,
            "best_sd": best_sd,
            "success_rate": self.success_rate,
            "diversity_mean": None if div is None else div[0],
            "diversity_sd": None if div is None else div[1],
        }
        lines = [json.dumps(header, sort_keys=True)]
        for rep in range(self.repetitions):
            lines.append(
                json.dumps(
                    {
                        "kind": "repetition",
                        "rep": rep,
                        "seed": self.base_seed + rep,
                        "best_fitness": self.per_rep_best[rep],
                        "best_key": self.best_keys[rep],
                        "proposals": self.per_rep_proposals[rep],
                        "success_rate": self.per_rep_success[rep],
                        "diversity": self.per_rep_diversity[rep],
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        best_mean, best_sd = self.best_mean_sd
        div = self.diversity_mean_sd
        rows = [
            ("task", self.task),
            ("optimizer", self.optimizer),
            ("repetitions", str(self.repetitions)),
            ("best fitness", f"{best_mean:.4f} +/- {best_sd:.4f}"),
            ("success rate", f"{self.success_rate * 100.0:.1f}%"),
        ]
        if div is not None:
            rows.append(("diversity", f"{div[0] * 100.0:.1f}% +/- {div[1] * 100.0:.1f}%"))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"

    def to_csv(self) -> str:
        out = ["rep,seed,best_fitness,best_key,proposals,success_rate,diversity"]
        for rep in range(self.repetitions):
            div = self.per_rep_diversity[rep]
            out.append(
                f"{rep},{self.base_seed + rep},{self.per_rep_best[rep]!r},"
                f"{self.best_keys[rep]},{self.per_rep_proposals[rep]},"
                f"{self.per_rep_success[rep]!r},{'' if div is None else repr(div)}"
            )
        return "\n".join(out) + "\n"

    def meta(self) -> dict:
        return {
            "wall_seconds": self.wall_seconds,
            "total_wall_seconds": math.fsum(self.wall_seconds),
        }

    def write(self, out_dir: str | Path, csv: bool = False) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.jsonl").write_text(self.to_json_lines())
        (out / "report.txt").write_text(self.to_table())
        if csv:
            (out / "report.csv").write_text(self.to_csv())
        (out / "meta.json").write_text(json.dumps(self.meta(), indent=2) + "\n")


@dataclass
class TimingRow:
    optimizer: str
    precondition_mean: float
    precondition_sd: float
    sample_mean: float
    sample_sd: float
    n_unique: int


def timing_table(rows: Sequence[TimingRow]) -> str:
    header = f"{'optimizer':<12} {'Training Time [s]':>22} {'Sample Time [s]':>22} {'unique':>8}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.optimizer:<12} "
            f"{row.precondition_mean:>12.3f} +/- {row.precondition_sd:<6.3f} "
            f"{row.sample_mean:>12.3f} +/- {row.sample_sd:<6.3f} "
            f"{row.n_unique:>8d}"
        )
    return "\n".join(lines) + "\n"
