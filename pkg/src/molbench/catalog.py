"""Property catalogue: canonical names and unit tags for every quantity a
provider can supply.  The wire protocol and the objective layer both
validate against this table."""

from __future__ import annotations

PROPERTY_UNITS: dict[str, str] = {
    "homo_ev": "eV",
    "lumo_ev": "eV",
    "gap_ev": "eV",
    "dipole_debye": "D",
    "st_gap_ev": "eV",
    "osc_strength": "dimensionless",
    "vee_ev": "eV",
    "docking_1syh": "kcal/mol",
    "docking_6y2f": "kcal/mol",
    "docking_4lde": "kcal/mol",
    "sascore": "dimensionless",
    "qed": "dimensionless",
    "logp": "dimensionless",
    "tpsa": "A^2",
    "alerts_pass": "bool",
    "dE_act_kcal": "kcal/mol",
    "dE_rxn_kcal": "kcal/mol",
}


class UnknownPropertyError(KeyError):
    pass


class UnitMismatchError(ValueError):
    pass


def check_property(name: str, unit: str | None = None) -> None:
    if name not in PROPERTY_UNITS:
        raise UnknownPropertyError(name)
    if unit is not None and unit != PROPERTY_UNITS[name]:
        raise UnitMismatchError(
            f"{name}: expected unit {PROPERTY_UNITS[name]!r}, got {unit!r}"
        )
