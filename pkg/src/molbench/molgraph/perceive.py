"""Structural perception summary used by the filter banks."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Molecule


@dataclass(frozen=True)
class PerceptionReport:
    n_rings: int
    max_ring_size: int
    min_ring_size: int
    n_bridgehead: int
    n_spiro: int
    aromatic_fraction: float
    conjugated_bond_fraction: float


# Elements whose lone pair lets a single bond participate in conjugation.
_LONE_PAIR = {"N", "O", "S"}


def _bridgehead_spiro(mol: Molecule) -> tuple[int, int]:
    """Counts over SSSR ring pairs.

    Bridgehead: atom with >=3 ring bonds shared by two rings that have at
    least two bonds in common (a bridged pair).  Spiro: sole shared atom of
    two rings.  Plain fused systems (one shared bond) contribute neither.
    """
    rings = mol.rings
    ring_bond_count = [0] * mol.n_atoms
    for bidx, bond in enumerate(mol.bonds):
        if mol.bond_in_ring(bidx):
            ring_bond_count[bond.a] += 1
            ring_bond_count[bond.b] += 1

    bridgeheads: set[int] = set()
    spiro: set[int] = set()
    for r1 in range(len(rings)):
        atoms1 = set(rings[r1].atoms)
        for r2 in range(r1 + 1, len(rings)):
            shared_atoms = atoms1 & set(rings[r2].atoms)
            if not shared_atoms:
                continue
            shared_bonds = rings[r1].bonds & rings[r2].bonds
            if len(shared_atoms) == 1 and not shared_bonds:
                spiro |= shared_atoms
            elif len(shared_bonds) >= 2:
                bridgeheads |= {a for a in shared_atoms if ring_bond_count[a] >= 3}
    return len(bridgeheads), len(spiro)


def _is_conjugated_bond(mol: Molecule, bidx: int) -> bool:
    if mol.is_aromatic_bond(bidx):
        return True
    bond = mol.bonds[bidx]
    if bond.order >= 2:
        return True

    def carries_pi(i: int) -> bool:
        if mol.is_aromatic_atom(i):
            return True
        if mol.atoms[i].element in _LONE_PAIR:
            return True
        return any(mol.bond_order(b) >= 2 for _, b in mol.neighbors(i))

    return carries_pi(bond.a) and carries_pi(bond.b)


def perceive(mol: Molecule) -> PerceptionReport:
    rings = mol.rings
    sizes = [r.size for r in rings]
    n_atoms = mol.n_atoms
    n_bonds = mol.n_bonds
    aromatic = sum(1 for i in range(n_atoms) if mol.is_aromatic_atom(i))
    conjugated = sum(1 for b in range(n_bonds) if _is_conjugated_bond(mol, b))
    n_bridgehead, n_spiro = _bridgehead_spiro(mol)
    return PerceptionReport(
        n_rings=len(rings),
        max_ring_size=max(sizes) if sizes else 0,
        min_ring_size=min(sizes) if sizes else 0,
        n_bridgehead=n_bridgehead,
        n_spiro=n_spiro,
        aromatic_fraction=aromatic / n_atoms if n_atoms else 0.0,
        conjugated_bond_fraction=conjugated / n_bonds if n_bonds else 0.0,
    )
