"""Filter banks: named pattern lists plus scalar threshold rules.

Banks are shipped as versioned text files (``data/banks/*.bank``) and can be
loaded from user paths with the same grammar::

    bank: docking
    version: 1
    forbid <name> <pattern>
    require <name> <pattern>
    scalar <descriptor> <op> <value>

Scalar descriptors fall in two groups: locally computable ones (structure
counts, weight, donor/acceptor counts) and provider-supplied ones (sascore,
qed, logp, tpsa, alerts_pass).  ``apply_filter_bank`` takes the full value
map; ``FilterBank.evaluate`` merges the local values automatically.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .descriptors import scalar_descriptors
from .molgraph import Molecule, perceive
from .smarts import PatternGraph, compile_pattern, has_match

PROVIDER_DESCRIPTORS = frozenset({"sascore", "qed", "logp", "tpsa", "alerts_pass"})

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}


class MissingDescriptorError(KeyError):
    pass


@dataclass(frozen=True)
class ScalarRule:
    descriptor: str
    op: str
    threshold: float

    def holds(self, value: float) -> bool:
        return _OPS[self.op](value, self.threshold)

    def __str__(self) -> str:
        return f"{self.descriptor} {self.op} {self.threshold:g}"


@dataclass(frozen=True)
class FilterVerdict:
    passed: bool
    violations: tuple[str, ...]


@dataclass
class FilterBank:
    name: str
    version: int = 1
    forbidden: list[tuple[str, PatternGraph]] = field(default_factory=list)
    required: list[tuple[str, PatternGraph]] = field(default_factory=list)
    scalars: list[ScalarRule] = field(default_factory=list)

    def scalar_descriptor_names(self) -> set[str]:
        return {rule.descriptor for rule in self.scalars}

    def with_extra_scalars(self, rules: Sequence[ScalarRule], suffix: str) -> "FilterBank":
        return FilterBank(
            name=f"{self.name}{suffix}",
            version=self.version,
            forbidden=list(self.forbidden),
            required=list(self.required),
            scalars=list(self.scalars) + list(rules),
        )

    def evaluate(
        self, mol: Molecule, provider_values: Optional[Mapping[str, float]] = None
    ) -> FilterVerdict:
        values = dict(local_descriptors(mol))
        if provider_values:
            values.update(provider_values)
        return apply_filter_bank(mol, self, values)


def local_descriptors(mol: Molecule) -> dict[str, float]:
    """Every scalar descriptor computable without a provider."""
    report = perceive(mol)
    scalars = scalar_descriptors(mol)
    return {
        "mw": scalars.molecular_weight,
        "hbd": float(scalars.h_bond_donors),
        "hba": float(scalars.h_bond_acceptors),
        "heavy_atoms": float(scalars.heavy_atom_count),
        "net_charge": float(mol.net_charge()),
        "n_charged_atoms": float(mol.n_charged_atoms()),
        "n_radical_electrons": float(mol.n_radical_electrons()),
        "n_rings": float(report.n_rings),
        "n_bridgehead": float(report.n_bridgehead),
        "n_spiro": float(report.n_spiro),
        "aromatic_fraction": report.aromatic_fraction,
        "conjugated_bond_fraction": report.conjugated_bond_fraction,
        "max_ring_size": float(report.max_ring_size),
        "min_ring_size": float(report.min_ring_size),
    }


def apply_filter_bank(
    mol: Molecule, bank: FilterBank, descriptor_values: Mapping[str, float]
) -> FilterVerdict:
    """Pure verdict: pass iff no forbidden match, all required match, and
    every scalar rule holds.  Missing scalar inputs raise, naming the
    descriptor."""
    violations: list[str] = []
    for rule in bank.scalars:
        if rule.descriptor not in descriptor_values:
            raise MissingDescriptorError(rule.descriptor)
        value = descriptor_values[rule.descriptor]
        if not rule.holds(value):
            violations.append(f"scalar: {rule} (got {value:g})")
    for label, pattern in bank.required:
        if not has_match(mol, pattern):
            violations.append(f"required: {label}")
    for label, pattern in bank.forbidden:
        if has_match(mol, pattern):
            violations.append(f"forbidden: {label}")
    return FilterVerdict(passed=not violations, violations=tuple(violations))


def parse_bank(text: str, name_hint: str = "bank") -> FilterBank:
    bank = FilterBank(name=name_hint)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("bank:"):
            bank.name = line.split(":", 1)[1].strip()
            continue
        if line.startswith("version:"):
            bank.version = int(line.split(":", 1)[1].strip())
            continue
        parts = line.split()
        kind = parts[0]
        if kind in ("forbid", "require"):
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected '{kind} <name> <pattern>'")
            label, pattern_text = parts[1], parts[2]
            pattern = compile_pattern(pattern_text)
            if kind == "forbid":
                bank.forbidden.append((label, pattern))
            else:
                bank.required.append((label, pattern))
        elif kind == "scalar":
            if len(parts) != 4 or parts[2] not in _OPS:
                raise ValueError(f"line {lineno}: expected 'scalar <descriptor> <op> <value>'")
            bank.scalars.append(ScalarRule(parts[1], parts[2], float(parts[3])))
        else:
            raise ValueError(f"line {lineno}: unknown directive {kind!r}")
    return bank


def load_bank(
    path: str | Path,
    scalar_overrides: Optional[Mapping[str, tuple[str, float]]] = None,
) -> FilterBank:
    bank = parse_bank(Path(path).read_text(), name_hint=Path(path).stem)
    return _apply_overrides(bank, scalar_overrides)


def _apply_overrides(bank, scalar_overrides):
    if scalar_overrides:
        replaced = []
        for rule in bank.scalars:
            if rule.descriptor in scalar_overrides:
                op, value = scalar_overrides[rule.descriptor]
                replaced.append(ScalarRule(rule.descriptor, op, value))
            else:
                replaced.append(rule)
        bank.scalars = replaced
    return bank


def shipped_bank(
    name: str,
    tpsa_practical: bool = False,
) -> FilterBank:
    """Load one of the bundled banks: docking, emitters, reactivity.

    ``tpsa_practical`` flips the docking bank's polar-surface-area rule from
    the as-published direction (> 140) to the conventional one (<= 140).
    """
    ref = resources.files("molbench").joinpath(f"data/banks/{name}.bank")
    bank = parse_bank(ref.read_text(), name_hint=name)
    overrides = {"tpsa": ("<=", 140.0)} if tpsa_practical else None
    return _apply_overrides(bank, overrides)
