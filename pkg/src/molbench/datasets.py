"""Dataset ingestion: one SMILES per line, optional tab-separated numeric
property columns under a header line, fixed 80/20 prefix split."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .molgraph import Molecule, canonical_key, parse_smiles
from .tasks import TaskDefinition


class DatasetParseError(ValueError):
    pass


class EmptyDatasetError(ValueError):
    pass


@dataclass
class DatasetHandle:
    path: str
    molecules: list[Molecule]
    keys: list[str]
    columns: dict[str, list[float]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.molecules)

    @property
    def split_index(self) -> int:
        return (self.n * 8) // 10

    @property
    def training(self) -> list[Molecule]:
        return self.molecules[: self.split_index]

    @property
    def holdout(self) -> list[Molecule]:
        return self.molecules[self.split_index :]

    def column(self, name: str) -> Optional[list[float]]:
        return self.columns.get(name)


def load_dataset(path: str | Path) -> DatasetHandle:
    path = Path(path)
    if not path.exists():
        raise DatasetParseError(f"no such file: {path}")
    lines = path.read_text().splitlines()
    rows = [(no, line.strip()) for no, line in enumerate(lines, 1) if line.strip()]
    if not rows:
        raise EmptyDatasetError(str(path))

    header: Optional[list[str]] = None
    first = rows[0][1]
    if "\t" in first:
        fields = first.split("\t")
        if fields[0].lower() != "smiles":
            raise DatasetParseError(
                "line 1: tab-separated datasets need a header starting with 'smiles'"
            )
        header = [name.strip() for name in fields[1:]]
        rows = rows[1:]
        if not rows:
            raise EmptyDatasetError(str(path))

    molecules: list[Molecule] = []
    keys: list[str] = []
    seen: dict[str, int] = {}
    columns: dict[str, list[float]] = {name: [] for name in (header or [])}
    for lineno, line in rows:
        fields = line.split("\t")
        smiles = fields[0].strip()
        try:
            mol = parse_smiles(smiles)
            key = canonical_key(mol)
        except ValueError as exc:
            raise DatasetParseError(f"line {lineno}: {exc}") from None
        if header is not None:
            if len(fields) != len(header) + 1:
                raise DatasetParseError(
                    f"line {lineno}: expected {len(header) + 1} columns, got {len(fields)}"
                )
            try:
                values = [float(x) for x in fields[1:]]
            except ValueError as exc:
                raise DatasetParseError(f"line {lineno}: {exc}") from None
        if key in seen:
            warnings.warn(
                f"{path.name} line {lineno}: duplicate of line {seen[key]} skipped",
                stacklevel=2,
            )
            continue
        seen[key] = lineno
        molecules.append(mol)
        keys.append(key)
        if header is not None:
            for name, value in zip(header, values):
                columns[name].append(value)
    return DatasetHandle(str(path), molecules, keys, columns)


def rank_seeds(handle: DatasetHandle, task: TaskDefinition) -> list[Molecule]:
    """Dataset molecules best-first for optimizer seeding.

    When every reference column the task names is present, molecules are
    ranked by the task scalarization over those columns; otherwise file
    order stands.
    """
    names = task.reference_columns
    if not names or any(name not in handle.columns for name in names):
        return list(handle.molecules)
    scores = []
    for i in range(handle.n):
        values = {name: handle.columns[name][i] for name in names}
        try:
            scores.append(task.scalarize(values))
        except (KeyError, ValueError):
            return list(handle.molecules)
    order = sorted(range(handle.n), key=lambda i: (-scores[i], handle.keys[i]))
    return [handle.molecules[i] for i in order]
