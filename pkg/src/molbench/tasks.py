"""The twelve benchmark objectives and their constraint gating.

Every task exposes one canonical *maximization* fitness: minimized physical
quantities enter negated, constraint or outlier failures return the penalty
fitness (-10,000) instead of raising, and missing provider values raise
:class:`MissingPropertyError` naming the absent property.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Mapping, Optional, Union

from .catalog import PROPERTY_UNITS, check_property
from .envelope import OutlierEnvelope, is_outlier
from .filters import FilterBank, FilterVerdict, ScalarRule, shipped_bank
from .molgraph import Molecule
from .scharber import FrontierEnergies, ScharberConfig, calibrate, scharber_pce

PENALTY_FITNESS = -10_000.0
BLUE_TARGET_EV = 3.2
EMITTER_SA_LIMIT = 4.5
REACTIVITY_SA_LIMIT = 6.0

# Unsubstituted double-hydrogen-transfer substrate: the smallest structure
# containing the reactivity tasks' required core.
PARENT_SUBSTRATE_SMILES = "C1C2C34C5C=CC(C5)C3(C4)C(C2)C1"


class MissingPropertyError(KeyError):
    pass


PropertyLike = Union[float, tuple[float, str]]


def as_value_map(properties: Mapping[str, PropertyLike]) -> dict[str, float]:
    """Accept bare floats or (value, unit) pairs; reject mismatched units."""
    values: dict[str, float] = {}
    for name, item in properties.items():
        if isinstance(item, tuple):
            value, unit = item
            check_property(name, unit)
        else:
            value = item
            check_property(name)
        values[name] = float(value)
    return values


@dataclass(frozen=True)
class TaskDefinition:
    """Constraint bank + property request set + scalarization for one task."""

    name: str
    required_properties: tuple[str, ...]
    scalarize: Callable[[Mapping[str, float]], float]
    filter_bank: Optional[FilterBank] = None
    constraint_properties: tuple[str, ...] = ()
    penalty_fitness: float = PENALTY_FITNESS
    population_size: int = 500
    iterations: int = 10
    envelope: Optional[OutlierEnvelope] = None
    envelope_properties: tuple[str, str] = ("dE_rxn_kcal", "dE_act_kcal")
    reference_columns: tuple[str, ...] = ()

    def all_properties(self) -> tuple[str, ...]:
        seen = dict.fromkeys(self.required_properties)
        seen.update(dict.fromkeys(self.constraint_properties))
        return tuple(seen)

    def with_envelope(self, envelope: OutlierEnvelope) -> "TaskDefinition":
        return replace(self, envelope=envelope)


def check_constraints(
    mol: Molecule, task: TaskDefinition, values: Mapping[str, float]
) -> FilterVerdict:
    if task.filter_bank is None:
        return FilterVerdict(True, ())
    provider_values = {
        name: values[name] for name in task.constraint_properties if name in values
    }
    missing = [
        name
        for name in task.filter_bank.scalar_descriptor_names()
        if name in PROPERTY_UNITS and name not in provider_values
    ]
    if missing:
        raise MissingPropertyError(missing[0])
    return task.filter_bank.evaluate(mol, provider_values)


def evaluate_task(
    mol: Molecule, task: TaskDefinition, properties: Mapping[str, PropertyLike]
) -> float:
    """Canonical maximization fitness; constraint failure yields the penalty."""
    values = as_value_map(properties)
    verdict = check_constraints(mol, task, values)
    if not verdict.passed:
        return task.penalty_fitness
    if task.envelope is not None:
        point = tuple(values[p] for p in task.envelope_properties if p in values)
        if len(point) == 2 and is_outlier(task.envelope, point):
            return task.penalty_fitness
    for name in task.required_properties:
        if name not in values:
            raise MissingPropertyError(name)
    return task.scalarize(values)


# -- scalarizations ---------------------------------------------------------


def _opv_fitness(mode: str, cfg: ScharberConfig) -> Callable[[Mapping[str, float]], float]:
    def fitness(values: Mapping[str, float]) -> float:
        energies = FrontierEnergies(
            homo_ev=values["homo_ev"],
            lumo_ev=values["lumo_ev"],
            dipole_debye=values.get("dipole_debye", 0.0),
        )
        pce = scharber_pce(calibrate(energies, cfg), mode, cfg)
        return pce - values["sascore"]

    return fitness


def _emitter_gap(values: Mapping[str, float]) -> float:
    return -values["st_gap_ev"]


def _emitter_osc(values: Mapping[str, float]) -> float:
    return values["osc_strength"]


def _emitter_combined(values: Mapping[str, float]) -> float:
    return (
        values["osc_strength"]
        - values["st_gap_ev"]
        - abs(values["vee_ev"] - BLUE_TARGET_EV)
    )


def _negated(name: str) -> Callable[[Mapping[str, float]], float]:
    def fitness(values: Mapping[str, float]) -> float:
        return -values[name]

    return fitness


def _react_combo_min(values: Mapping[str, float]) -> float:
    return -(values["dE_act_kcal"] + values["dE_rxn_kcal"])


def _react_combo_bep(values: Mapping[str, float]) -> float:
    return -(-values["dE_act_kcal"] + values["dE_rxn_kcal"])


_DOCKING_PROVIDER_PROPS = ("sascore", "qed", "logp", "tpsa", "alerts_pass")


def make_task_registry(
    scharber_cfg: Optional[ScharberConfig] = None,
    tpsa_practical: bool = False,
    envelope: Optional[OutlierEnvelope] = None,
) -> dict[str, TaskDefinition]:
    """Build all twelve benchmark task definitions."""
    if scharber_cfg is None:
        scharber_cfg = default_scharber_config()

    emitter_gate = FilterBank(
        name="emitters-sa",
        scalars=[ScalarRule("sascore", "<=", EMITTER_SA_LIMIT)],
    )
    docking_bank = shipped_bank("docking", tpsa_practical=tpsa_practical)
    reactivity_bank = shipped_bank("reactivity")
    reactivity_sa = reactivity_bank.with_extra_scalars(
        [ScalarRule("sascore", "<=", REACTIVITY_SA_LIMIT)], suffix="-sa"
    )

    tasks = [
        TaskDefinition(
            name="opv-pcbm",
            required_properties=("homo_ev", "lumo_ev", "sascore"),
            scalarize=_opv_fitness("donor_pcbm", scharber_cfg),
            reference_columns=("homo_ev", "lumo_ev", "sascore"),
        ),
        TaskDefinition(
            name="opv-pcdtbt",
            required_properties=("homo_ev", "lumo_ev", "sascore"),
            scalarize=_opv_fitness("acceptor_pcdtbt", scharber_cfg),
            reference_columns=("homo_ev", "lumo_ev", "sascore"),
        ),
        TaskDefinition(
            name="emitter-gap",
            required_properties=("st_gap_ev",),
            scalarize=_emitter_gap,
            filter_bank=emitter_gate,
            constraint_properties=("sascore",),
            reference_columns=("st_gap_ev", "sascore"),
        ),
        TaskDefinition(
            name="emitter-osc",
            required_properties=("osc_strength",),
            scalarize=_emitter_osc,
            filter_bank=emitter_gate,
            constraint_properties=("sascore",),
            reference_columns=("osc_strength", "sascore"),
        ),
        TaskDefinition(
            name="emitter-combo",
            required_properties=("osc_strength", "st_gap_ev", "vee_ev"),
            scalarize=_emitter_combined,
            filter_bank=emitter_gate,
            constraint_properties=("sascore",),
            reference_columns=("osc_strength", "st_gap_ev", "vee_ev", "sascore"),
        ),
        TaskDefinition(
            name="dock-1syh",
            required_properties=("docking_1syh",),
            scalarize=_negated("docking_1syh"),
            filter_bank=docking_bank,
            constraint_properties=_DOCKING_PROVIDER_PROPS,
            reference_columns=("docking_1syh",),
        ),
        TaskDefinition(
            name="dock-6y2f",
            required_properties=("docking_6y2f",),
            scalarize=_negated("docking_6y2f"),
            filter_bank=docking_bank,
            constraint_properties=_DOCKING_PROVIDER_PROPS,
            reference_columns=("docking_6y2f",),
        ),
        TaskDefinition(
            name="dock-4lde",
            required_properties=("docking_4lde",),
            scalarize=_negated("docking_4lde"),
            filter_bank=docking_bank,
            constraint_properties=_DOCKING_PROVIDER_PROPS,
            reference_columns=("docking_4lde",),
        ),
        TaskDefinition(
            name="react-act",
            required_properties=("dE_act_kcal",),
            scalarize=_negated("dE_act_kcal"),
            filter_bank=reactivity_bank,
            population_size=100,
            iterations=50,
            envelope=envelope,
            reference_columns=("dE_act_kcal",),
        ),
        TaskDefinition(
            name="react-rxn",
            required_properties=("dE_rxn_kcal",),
            scalarize=_negated("dE_rxn_kcal"),
            filter_bank=reactivity_bank,
            population_size=100,
            iterations=50,
            envelope=envelope,
            reference_columns=("dE_rxn_kcal",),
        ),
        TaskDefinition(
            name="react-combo-min",
            required_properties=("dE_act_kcal", "dE_rxn_kcal"),
            scalarize=_react_combo_min,
            filter_bank=reactivity_sa,
            constraint_properties=("sascore",),
            population_size=100,
            iterations=50,
            envelope=envelope,
            reference_columns=("dE_act_kcal", "dE_rxn_kcal", "sascore"),
        ),
        TaskDefinition(
            name="react-combo-bep",
            required_properties=("dE_act_kcal", "dE_rxn_kcal"),
            scalarize=_react_combo_bep,
            filter_bank=reactivity_sa,
            constraint_properties=("sascore",),
            population_size=100,
            iterations=50,
            envelope=envelope,
            reference_columns=("dE_act_kcal", "dE_rxn_kcal", "sascore"),
        ),
    ]
    return {task.name: task for task in tasks}


_DEFAULT_SCHARBER: list[Optional[ScharberConfig]] = [None]


def default_scharber_config() -> ScharberConfig:
    """Surrogate parameters fitted once from the bundled spectrum."""
    if _DEFAULT_SCHARBER[0] is None:
        _DEFAULT_SCHARBER[0] = ScharberConfig.from_spectrum()
    return _DEFAULT_SCHARBER[0]
