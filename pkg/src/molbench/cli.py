"""Command-line entry point.

Commands::

    bench run --task <name> --dataset <path> --optimizer ga|markov-hc
              [--budget 5000 --population 500 --iterations 10 --reps 5
               --seed 0 --provider-cmd CMD --out DIR --csv --workers N
               --unique-only --tpsa-practical]
    bench timing --dataset <path> [--n 10000 --reps 5 --seed 0 --optimizers ga,markov-hc]
    bench diversity --in <smiles file>
    bench dataset expand --seed-smiles <smiles> [--bank reactivity --target 1000
              --reorderings 20 --mutations 20 --seed 0 --out FILE]
    bench filters check --bank <name> --in <smiles file> [--tpsa-practical]

Environment: TARTARUS_PROVIDER_CMD supplies the default provider command,
TARTARUS_CACHE_DIR the persistent record store location.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import OPTIMIZERS, run_benchmark, run_timing
from .datasets import load_dataset
from .descriptors import diversity
from .filters import FilterBank, shipped_bank
from .molgraph import parse_smiles, write_smiles
from .providers import (
    NullProvider,
    SubprocessProvider,
    provider_from_env,
)
from .reports import timing_table
from .selfies import expand_dataset
from .tasks import PARENT_SUBSTRATE_SMILES, make_task_registry

# Constant stand-in values served when no provider is configured; fine for
# smoke tests, meaningless for real benchmarking.
SMOKE_DEFAULTS = {
    "homo_ev": -5.5,
    "lumo_ev": -3.0,
    "gap_ev": 2.5,
    "dipole_debye": 1.0,
    "st_gap_ev": 0.5,
    "osc_strength": 0.3,
    "vee_ev": 3.0,
    "docking_1syh": -5.0,
    "docking_6y2f": -5.0,
    "docking_4lde": -5.0,
    "sascore": 3.0,
    "qed": 0.5,
    "logp": 2.0,
    "tpsa": 150.0,
    "alerts_pass": 1.0,
    "dE_act_kcal": 80.0,
    "dE_rxn_kcal": 0.0,
}


def _provider(args) -> object:
    if getattr(args, "provider_cmd", None):
        return SubprocessProvider(args.provider_cmd)
    provider = provider_from_env(default=None)
    if provider is not None:
        return provider
    print("note: no provider configured; serving constant smoke-test values", file=sys.stderr)
    return NullProvider(defaults=SMOKE_DEFAULTS)


def _cmd_run(args) -> int:
    registry = make_task_registry(tpsa_practical=args.tpsa_practical)
    if args.task not in registry:
        print(f"unknown task {args.task!r}; available: {', '.join(sorted(registry))}", file=sys.stderr)
        return 2
    task = registry[args.task]
    dataset = load_dataset(args.dataset)
    provider = _provider(args)
    report, _ = run_benchmark(
        task,
        args.optimizer,
        dataset,
        provider,
        seed=args.seed,
        repetitions=args.reps,
        budget_proposals=args.budget,
        population_size=args.population,
        iterations=args.iterations,
        out_dir=args.out,
        csv=args.csv,
        workers=args.workers,
        count_duplicates=not args.unique_only,
    )
    print(report.to_table(), end="")
    if args.out:
        print(f"reports written to {args.out}")
    return 0


def _cmd_timing(args) -> int:
    dataset = load_dataset(args.dataset)
    names = [n.strip() for n in args.optimizers.split(",") if n.strip()]
    rows = run_timing(
        dataset,
        optimizers=names,
        n_unique=args.n,
        repetitions=args.reps,
        seed=args.seed,
    )
    print(timing_table(rows), end="")
    return 0


def _cmd_diversity(args) -> int:
    molecules = []
    for lineno, line in enumerate(Path(args.infile).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        molecules.append(parse_smiles(line.split("\t")[0]))
    if len(molecules) < 2:
        print("need at least two molecules", file=sys.stderr)
        return 2
    print(f"diversity = {diversity(molecules):.6f} over {len(molecules)} molecules")
    return 0


def _load_bank(name: str, tpsa_practical: bool) -> FilterBank:
    if Path(name).exists():
        from .filters import load_bank

        overrides = {"tpsa": ("<=", 140.0)} if tpsa_practical else None
        return load_bank(name, scalar_overrides=overrides)
    return shipped_bank(name, tpsa_practical=tpsa_practical)


def _cmd_dataset_expand(args) -> int:
    seed_smiles = args.seed_smiles or PARENT_SUBSTRATE_SMILES
    seed = parse_smiles(seed_smiles)
    predicate = lambda mol: True  # noqa: E731
    if args.bank:
        bank = _load_bank(args.bank, tpsa_practical=False)
        from .catalog import PROPERTY_UNITS

        provider_rules = [
            r for r in bank.scalars if r.descriptor in PROPERTY_UNITS
        ]
        if provider_rules:
            print(
                f"bank {bank.name!r} needs provider descriptors "
                f"({', '.join(r.descriptor for r in provider_rules)}); "
                "expansion predicates must be locally computable",
                file=sys.stderr,
            )
            return 2
        predicate = lambda mol: bank.evaluate(mol).passed  # noqa: E731
    molecules = expand_dataset(
        seed,
        predicate,
        reorderings=args.reorderings,
        mutations_per=args.mutations,
        target_size=args.target,
        rng_seed=args.seed,
    )
    lines = [write_smiles(m) for m in molecules]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
        print(f"wrote {len(lines)} molecules to {args.out}")
    else:
        print("\n".join(lines))
    return 0


def _cmd_filters_check(args) -> int:
    bank = _load_bank(args.bank, tpsa_practical=args.tpsa_practical)
    from .catalog import PROPERTY_UNITS
    from .providers import Budget, Evaluator

    provider_props = tuple(
        r.descriptor for r in bank.scalars if r.descriptor in PROPERTY_UNITS
    )
    evaluator = None
    if provider_props:
        provider = _provider(args)
        evaluator = Evaluator(provider, Budget(max_proposals=10**9))

    n_pass = 0
    n_total = 0
    for lineno, line in enumerate(Path(args.infile).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        smiles = line.split("\t")[0]
        try:
            mol = parse_smiles(smiles)
        except ValueError as exc:
            print(f"{smiles}\tPARSE_ERROR\t{exc}")
            continue
        provider_values = {}
        if evaluator is not None:
            result = evaluator.evaluate_one(smiles, provider_props)
            record = result.records[0]
            if record.ok():
                provider_values = {k: v[0] for k, v in record.values.items()}
            else:
                print(f"{smiles}\tPROVIDER_ERROR\t{record.status}")
                continue
        verdict = bank.evaluate(mol, provider_values)
        n_total += 1
        n_pass += int(verdict.passed)
        status = "PASS" if verdict.passed else "FAIL"
        detail = "" if verdict.passed else "; ".join(verdict.violations)
        print(f"{smiles}\t{status}\t{detail}")
    if n_total:
        print(f"# {n_pass}/{n_total} passed ({100.0 * n_pass / n_total:.1f}%)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one benchmark task")
    run.add_argument("--task", required=True)
    run.add_argument("--dataset", required=True)
    run.add_argument("--optimizer", choices=OPTIMIZERS, default="ga")
    run.add_argument("--budget", type=int, default=5_000)
    run.add_argument("--population", type=int, default=None)
    run.add_argument("--iterations", type=int, default=None)
    run.add_argument("--reps", type=int, default=5)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--provider-cmd", default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--csv", action="store_true")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--unique-only", action="store_true",
                     help="charge budget only for unique proposals")
    run.add_argument("--tpsa-practical", action="store_true",
                     help="flip the docking TPSA rule to <= 140")
    run.set_defaults(func=_cmd_run)

    timing = sub.add_parser("timing", help="pre-conditioning and sampling timings")
    timing.add_argument("--dataset", required=True)
    timing.add_argument("--n", type=int, default=10_000)
    timing.add_argument("--reps", type=int, default=5)
    timing.add_argument("--seed", type=int, default=0)
    timing.add_argument("--optimizers", default=",".join(OPTIMIZERS))
    timing.set_defaults(func=_cmd_timing)

    div = sub.add_parser("diversity", help="population diversity of a SMILES file")
    div.add_argument("--in", dest="infile", required=True)
    div.set_defaults(func=_cmd_diversity)

    dataset = sub.add_parser("dataset", help="dataset utilities")
    dataset_sub = dataset.add_subparsers(dest="dataset_command", required=True)
    expand = dataset_sub.add_parser("expand", help="mutation-cycle expansion from a seed")
    expand.add_argument("--seed-smiles", default=None)
    expand.add_argument("--bank", default=None)
    expand.add_argument("--target", type=int, default=1_000)
    expand.add_argument("--reorderings", type=int, default=20)
    expand.add_argument("--mutations", type=int, default=20)
    expand.add_argument("--seed", type=int, default=0)
    expand.add_argument("--out", default=None)
    expand.set_defaults(func=_cmd_dataset_expand)

    filters = sub.add_parser("filters", help="filter bank utilities")
    filters_sub = filters.add_subparsers(dest="filters_command", required=True)
    check = filters_sub.add_parser("check", help="apply a bank to a SMILES file")
    check.add_argument("--bank", required=True)
    check.add_argument("--in", dest="infile", required=True)
    check.add_argument("--provider-cmd", default=None)
    check.add_argument("--tpsa-practical", action="store_true")
    check.set_defaults(func=_cmd_filters_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
