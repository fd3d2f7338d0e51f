"""Reference budgeted optimizers.

Two proposal engines are provided: a genetic algorithm over the validity-
guaranteed token sequences (tournament selection, single-token mutation or
single-point crossover per child, elitist survivor merge) and a hill climber
driven by an order-k Markov sequence model ("markov-hc"), which stands in
for the published LSTM loop with the neural model swapped for transition
counts: per iteration the two best known molecules are rewritten as
randomized strings, truncated to a random 25-75% prefix and completed by
sampling the model, which is retrained on each iteration's new molecules.

Every proposal passes through the provider evaluator, so budget accounting
and caching behave identically for both engines, and all randomness flows
from one seeded generator: traces are bit-reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from random import Random
from typing import Iterable, Optional, Sequence

from .molgraph import Molecule, canonical_key, parse_smiles, write_smiles
from .providers import Budget, Evaluator, PropertyRequest, Provider
from .selfies import (
    ALPHABET,
    SelfiesSequence,
    crossover,
    decode,
    encode,
    mutate,
    randomized_smiles,
)
from .tasks import TaskDefinition, check_constraints, evaluate_task, as_value_map


class DegenerateSetError(ValueError):
    pass


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    proposal_index: int
    canonical_key: str
    fitness: float
    cumulative_budget: int


@dataclass
class RunTrace:
    task_name: str
    optimizer: str
    rng_seed: int
    entries: list[TraceEntry] = field(default_factory=list)
    best_by_iteration: list[float] = field(default_factory=list)
    constraint_passes: int = 0
    exhausted: bool = False
    degenerate: bool = False
    fingerprints: list = field(default_factory=list)  # populated on request

    @property
    def best_fitness(self) -> float:
        return max(e.fitness for e in self.entries)

    @property
    def best_key(self) -> str:
        best = max(self.entries, key=lambda e: (e.fitness, e.canonical_key))
        return best.canonical_key

    @property
    def n_proposals(self) -> int:
        return len(self.entries)

    def to_lines(self) -> list[str]:
        return [
            f"{e.iteration}\t{e.proposal_index}\t{e.canonical_key}\t{e.fitness!r}\t{e.cumulative_budget}"
            for e in self.entries
        ]


# -- scoring through the provider layer ------------------------------------


class ObjectiveRunner:
    """Scores molecule batches for one task through an evaluator."""

    def __init__(
        self,
        task: TaskDefinition,
        evaluator: Evaluator,
        collect_fingerprints: bool = False,
    ):
        self.task = task
        self.evaluator = evaluator
        self.collect_fingerprints = collect_fingerprints
        self.fingerprints: list = []
        self._counter = 0

    def score(self, molecules: Sequence[Molecule]):
        """Returns (fitnesses, passed_flags, exhausted).

        Provider failures score the penalty fitness: the proposal consumed
        budget but produced no usable simulation result.
        """
        requests = []
        for mol in molecules:
            self._counter += 1
            requests.append(
                PropertyRequest(
                    request_id=f"p{self._counter}",
                    smiles=write_smiles(mol),
                    properties=self.task.all_properties(),
                )
            )
        result = self.evaluator.evaluate(requests)
        fitnesses: list[float] = []
        passed: list[bool] = []
        for mol, record in zip(molecules, result.records):
            if self.collect_fingerprints:
                from .descriptors import morgan_fingerprint

                self.fingerprints.append(morgan_fingerprint(mol))
            if not record.ok():
                fitnesses.append(self.task.penalty_fitness)
                passed.append(False)
                continue
            values = {name: pair for name, pair in record.values.items()}
            verdict = check_constraints(mol, self.task, as_value_map(values))
            fitnesses.append(evaluate_task(mol, self.task, values))
            passed.append(verdict.passed)
        return fitnesses, passed, result.exhausted


# -- genetic algorithm ------------------------------------------------------


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 500
    iterations: int = 10
    tournament_size: int = 3
    elite_count: int = 1
    mutation_rate: float = 0.7
    crossover_rate: float = 0.3
    rng_seed: int = 0


@dataclass
class _Member:
    molecule: Molecule
    sequence: SelfiesSequence
    key: str
    fitness: float = float("-inf")


def _encode_seeds(seeds: Sequence[Molecule]) -> list[_Member]:
    members = []
    for mol in seeds:
        try:
            members.append(_Member(mol, encode(mol), canonical_key(mol)))
        except ValueError:
            continue  # seed outside the codec alphabet
    if not members:
        raise ValueError("no seed molecule could be encoded")
    return members


def _tournament(rng: Random, population: list[_Member], size: int) -> _Member:
    picks = [population[rng.randrange(len(population))] for _ in range(size)]
    return max(picks, key=lambda m: (m.fitness, m.key))


def _spawn_child(rng: Random, population: list[_Member], cfg: GaConfig) -> Molecule:
    total = cfg.mutation_rate + cfg.crossover_rate
    for _ in range(20):
        parent = _tournament(rng, population, cfg.tournament_size)
        if rng.random() * total < cfg.crossover_rate:
            other = _tournament(rng, population, cfg.tournament_size)
            child = crossover(parent.sequence, other.sequence, rng.getrandbits(32))
        else:
            child = mutate(parent.sequence, rng.getrandbits(32))
        mol = decode(child)
        if mol.n_atoms > 0:
            return mol
    return parent.molecule


def run_ga(
    task: TaskDefinition,
    dataset_seeds: Sequence[Molecule],
    provider: Provider,
    budget: Budget,
    cfg: GaConfig,
    evaluator: Optional[Evaluator] = None,
    collect_fingerprints: bool = False,
) -> RunTrace:
    """Budgeted GA; the seed population is evaluation round zero."""
    if cfg.population_size * cfg.iterations > budget.max_proposals:
        raise ValueError("population_size x iterations exceeds the proposal budget")
    if not dataset_seeds:
        raise ValueError("need at least one seed molecule")
    rng = Random(cfg.rng_seed)
    if evaluator is None:
        evaluator = Evaluator(provider, budget)
    else:
        evaluator.budget = budget  # the budget argument is authoritative
    runner = ObjectiveRunner(task, evaluator, collect_fingerprints)
    trace = RunTrace(task.name, "ga", cfg.rng_seed)
    trace.fingerprints = runner.fingerprints

    seeds = _encode_seeds(dataset_seeds)
    population = [seeds[i % len(seeds)] for i in range(cfg.population_size)]

    def evaluate_round(iteration: int, members: list[_Member]) -> bool:
        molecules = [m.molecule for m in members]
        fitnesses, passed, exhausted = runner.score(molecules)
        for idx, (member, fitness, ok) in enumerate(zip(members, fitnesses, passed)):
            member.fitness = fitness
            trace.entries.append(
                TraceEntry(
                    iteration=iteration,
                    proposal_index=idx,
                    canonical_key=member.key,
                    fitness=fitness,
                    cumulative_budget=budget.consumed_proposals,
                )
            )
            trace.constraint_passes += int(ok)
        if trace.entries:
            trace.best_by_iteration.append(trace.best_fitness)
        del members[len(fitnesses):]
        return exhausted

    if evaluate_round(0, population):
        trace.exhausted = True
        return trace

    for iteration in range(1, cfg.iterations + 1):
        children = []
        for _ in range(cfg.population_size):
            mol = _spawn_child(rng, population, cfg)
            children.append(_Member(mol, encode(mol), canonical_key(mol)))
        exhausted = evaluate_round(iteration, children)
        pool = sorted(
            population + children, key=lambda m: (m.fitness, m.key), reverse=True
        )
        population = pool[: cfg.population_size]
        if exhausted:
            trace.exhausted = True
            break
    return trace


# -- markov sequence model --------------------------------------------------

_BOS = "<s>"
_EOS = "</s>"


class MarkovModel:
    """Order-k transition counts over token sequences, Laplace smoothed."""

    def __init__(self, order: int = 3, smoothing: float = 0.1):
        if order < 0:
            raise ValueError("order must be >= 0")
        self.order = order
        self.smoothing = smoothing
        self.counts: dict[tuple[str, ...], dict[str, int]] = {}
        self.vocabulary: list[str] = list(ALPHABET) + [_EOS]

    def train(self, sequences: Iterable[SelfiesSequence]) -> None:
        for seq in sequences:
            tokens = [_BOS] * self.order + list(seq.tokens) + [_EOS]
            for i in range(self.order, len(tokens)):
                context = tuple(tokens[i - self.order : i])
                bucket = self.counts.setdefault(context, {})
                bucket[tokens[i]] = bucket.get(tokens[i], 0) + 1

    def distribution(self, context: Sequence[str]) -> dict[str, float]:
        context = tuple(([_BOS] * self.order + list(context))[-self.order :]) if self.order else ()
        bucket = self.counts.get(context, {})
        total = sum(bucket.values()) + self.smoothing * len(self.vocabulary)
        return {
            token: (bucket.get(token, 0) + self.smoothing) / total
            for token in self.vocabulary
        }

    def sample_next(self, context: Sequence[str], rng: Random) -> str:
        dist = self.distribution(context)
        roll = rng.random()
        acc = 0.0
        for token, p in dist.items():
            acc += p
            if roll < acc:
                return token
        return self.vocabulary[-1]

    def complete(
        self, prefix: Sequence[str], rng: Random, max_len: int = 120
    ) -> SelfiesSequence:
        tokens = list(prefix)
        while len(tokens) < max_len:
            nxt = self.sample_next(tokens, rng)
            if nxt == _EOS:
                break
            tokens.append(nxt)
        return SelfiesSequence(tuple(tokens))


@dataclass(frozen=True)
class MarkovHcConfig:
    population_size: int = 500
    iterations: int = 10
    order: int = 3
    smoothing: float = 0.1
    n_reorderings: int = 5
    truncation: tuple[float, float] = (0.25, 0.75)
    top_k: int = 2
    max_len: int = 120
    rng_seed: int = 0


def _truncate(seq: SelfiesSequence, rng: Random, bounds: tuple[float, float]) -> list[str]:
    fraction = rng.uniform(bounds[0], bounds[1])
    keep = max(1, int(round(fraction * len(seq))))
    return list(seq.tokens[:keep])


def run_markov_hc(
    task: TaskDefinition,
    dataset: Sequence[Molecule],
    provider: Provider,
    budget: Budget,
    cfg: MarkovHcConfig,
    evaluator: Optional[Evaluator] = None,
    collect_fingerprints: bool = False,
) -> RunTrace:
    """Hill climbing with a Markov sequence model over the token alphabet."""
    if not dataset:
        raise ValueError("markov-hc needs a non-empty dataset")
    rng = Random(cfg.rng_seed)
    if evaluator is None:
        evaluator = Evaluator(provider, budget)
    else:
        evaluator.budget = budget
    runner = ObjectiveRunner(task, evaluator, collect_fingerprints)
    trace = RunTrace(task.name, "markov-hc", cfg.rng_seed)
    trace.fingerprints = runner.fingerprints
    degenerate = cfg.truncation[0] >= 1.0 and cfg.truncation[1] >= 1.0
    trace.degenerate = degenerate

    model = MarkovModel(cfg.order, cfg.smoothing)
    seeds = _encode_seeds(dataset)
    model.train(member.sequence for member in seeds)

    known: list[_Member] = []

    def evaluate_round(iteration: int, members: list[_Member]) -> bool:
        molecules = [m.molecule for m in members]
        fitnesses, passed, exhausted = runner.score(molecules)
        for idx, (member, fitness, ok) in enumerate(zip(members, fitnesses, passed)):
            member.fitness = fitness
            known.append(member)
            trace.entries.append(
                TraceEntry(
                    iteration=iteration,
                    proposal_index=idx,
                    canonical_key=member.key,
                    fitness=fitness,
                    cumulative_budget=budget.consumed_proposals,
                )
            )
            trace.constraint_passes += int(ok)
        if trace.entries:
            trace.best_by_iteration.append(trace.best_fitness)
        return exhausted

    if evaluate_round(0, seeds[: cfg.top_k]):
        trace.exhausted = True
        return trace

    for iteration in range(1, cfg.iterations + 1):
        top = sorted(known, key=lambda m: (m.fitness, m.key), reverse=True)[: cfg.top_k]
        stubs: list[list[str]] = []
        for member in top:
            for smi in randomized_smiles(member.molecule, cfg.n_reorderings, rng.getrandbits(32)):
                try:
                    seq = encode(parse_smiles(smi))
                except ValueError:
                    continue
                stubs.append(list(seq.tokens) if degenerate else _truncate(seq, rng, cfg.truncation))
        if not stubs:
            break
        proposals: list[_Member] = []
        stub_idx = 0
        while len(proposals) < cfg.population_size:
            stub = stubs[stub_idx % len(stubs)]
            stub_idx += 1
            mol = None
            for _ in range(10):
                candidate = decode(model.complete(stub, rng, cfg.max_len))
                if candidate.n_atoms > 0:
                    mol = candidate
                    break
            if mol is None:
                mol = decode(SelfiesSequence(tuple(stub)))
            if mol.n_atoms == 0:
                continue
            proposals.append(_Member(mol, encode(mol), canonical_key(mol)))
        exhausted = evaluate_round(iteration, proposals)
        model.train(member.sequence for member in proposals)
        if exhausted:
            trace.exhausted = True
            break
    return trace


# -- score shaping -----------------------------------------------------------


def shape_score(fitness: float, known_fitnesses: Sequence[float], threshold: float = 0.8) -> float:
    """Sigmoid shaping: 0 at the mean of the known set, ``threshold`` at its
    maximum, approaching -1/+1 asymptotically."""
    if len(known_fitnesses) < 2:
        raise ValueError("need at least two known fitness values")
    mean = math.fsum(known_fitnesses) / len(known_fitnesses)
    best = max(known_fitnesses)
    if best <= mean:
        raise DegenerateSetError("max of the fitness set equals its mean")
    slope = -1.0 / (best - mean) * math.log(2.0 / (threshold + 1.0) - 1.0)
    exponent = -slope * (fitness - mean)
    if exponent > 700.0:  # sigmoid underflow: asymptote
        return -1.0
    if exponent < -700.0:
        return 1.0
    return 2.0 / (1.0 + math.exp(exponent)) - 1.0


# -- timing probes -----------------------------------------------------------


def precondition_ga(dataset: Sequence[Molecule]) -> tuple[float, list[_Member]]:
    """Wall time to derive the GA's working material from the dataset."""
    start = time.perf_counter()
    members = _encode_seeds(dataset)
    return time.perf_counter() - start, members


def precondition_markov(
    dataset: Sequence[Molecule], cfg: MarkovHcConfig
) -> tuple[float, tuple[MarkovModel, list[_Member]]]:
    start = time.perf_counter()
    members = _encode_seeds(dataset)
    model = MarkovModel(cfg.order, cfg.smoothing)
    model.train(member.sequence for member in members)
    return time.perf_counter() - start, (model, members)


def sample_unique_ga(
    seeds: Sequence[_Member], n: int, cfg: GaConfig, rng_seed: int
) -> tuple[float, list[str]]:
    """Single-generation sampling under a constant dummy fitness of 1."""
    rng = Random(rng_seed)
    population = [
        _Member(m.molecule, m.sequence, m.key, 1.0) for m in seeds
    ]
    start = time.perf_counter()
    unique: dict[str, None] = {}
    while len(unique) < n:
        mol = _spawn_child(rng, population, cfg)
        unique.setdefault(canonical_key(mol), None)
    return time.perf_counter() - start, list(unique)


def sample_unique_markov(
    model: MarkovModel,
    seeds: Sequence[_Member],
    n: int,
    cfg: MarkovHcConfig,
    rng_seed: int,
) -> tuple[float, list[str]]:
    rng = Random(rng_seed)
    start = time.perf_counter()
    unique: dict[str, None] = {}
    while len(unique) < n:
        member = seeds[rng.randrange(len(seeds))]
        stub = _truncate(member.sequence, rng, cfg.truncation)
        mol = decode(model.complete(stub, rng, cfg.max_len))
        if mol.n_atoms == 0:
            continue
        unique.setdefault(canonical_key(mol), None)
    return time.perf_counter() - start, list(unique)
