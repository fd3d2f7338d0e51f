"""Circular fingerprints, Tanimoto similarity, population diversity and the
locally computable scalar descriptors.

Fingerprint bit patterns are internal: the hashing is deterministic and
renumbering-invariant, but deliberately not interoperable with any external
toolkit, so similarity values are only comparable within this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .elements import ATOMIC_NUMBER, ATOMIC_WEIGHT
from .molgraph import Molecule

FP_BITS = 2048
FP_RADIUS = 3

_MASK64 = (1 << 64) - 1


class LengthMismatchError(ValueError):
    pass


class PopulationTooSmallError(ValueError):
    pass


def _mix(h: int, value: int) -> int:
    # FNV-1a style 64-bit mixing; stable across runs and platforms.
    h = (h ^ (value & _MASK64)) * 0x100000001B3 & _MASK64
    h ^= h >> 29
    return h


def _hash_ints(values: Iterable[int]) -> int:
    h = 0xCBF29CE484222325
    for v in values:
        h = _mix(h, v)
    return h


@dataclass(frozen=True)
class Fingerprint:
    """Fixed-length bit vector stored as a big integer."""

    bits: int
    n_bits: int = FP_BITS
    radius: int = FP_RADIUS

    def count(self) -> int:
        return self.bits.bit_count()

    def to_hex(self) -> str:
        return f"{self.bits:0{self.n_bits // 4}x}"

    @classmethod
    def from_hex(cls, text: str, n_bits: int = FP_BITS) -> "Fingerprint":
        return cls(int(text, 16), n_bits=n_bits)


def morgan_fingerprint(mol: Molecule, radius: int = FP_RADIUS, n_bits: int = FP_BITS) -> Fingerprint:
    """Iterative neighborhood hashing over radii 0..radius, folded to n_bits."""
    n = mol.n_atoms
    if n == 0:
        return Fingerprint(0, n_bits=n_bits, radius=radius)
    invariants = [
        _hash_ints(
            (
                ATOMIC_NUMBER[mol.element(i)],
                mol.degree(i),
                mol.charge(i) + 8,
                mol.total_h(i),
                int(mol.in_ring(i)),
                int(mol.is_aromatic_atom(i)),
            )
        )
        for i in range(n)
    ]
    bits = 0
    for rad in range(radius + 1):
        for h in invariants:
            bits |= 1 << (h % n_bits)
        if rad == radius:
            break
        updated = []
        for i in range(n):
            env = sorted(
                (
                    4 if mol.is_aromatic_bond(b) else mol.bond_order(b),
                    invariants[j],
                )
                for j, b in mol.neighbors(i)
            )
            stream = [rad + 1, invariants[i]]
            for order, nbr_hash in env:
                stream.append(order)
                stream.append(nbr_hash)
            updated.append(_hash_ints(stream))
        invariants = updated
    return Fingerprint(bits, n_bits=n_bits, radius=radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|; defined as 1.0 when both vectors are empty."""
    if a.n_bits != b.n_bits:
        raise LengthMismatchError(f"fingerprint lengths differ: {a.n_bits} vs {b.n_bits}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union


def diversity(population: Sequence[Molecule]) -> float:
    """1 - (2 / n(n-1)) * sum of pairwise Tanimoto similarities."""
    n = len(population)
    if n < 2:
        raise PopulationTooSmallError("diversity needs at least 2 molecules")
    prints = [morgan_fingerprint(m) for m in population]
    return diversity_from_fingerprints(prints)


def diversity_from_fingerprints(prints: Sequence[Fingerprint]) -> float:
    n = len(prints)
    if n < 2:
        raise PopulationTooSmallError("diversity needs at least 2 fingerprints")
    if n > 256:
        return _diversity_blas(prints)
    total = math.fsum(
        tanimoto(prints[i], prints[j]) for i in range(n) for j in range(i + 1, n)
    )
    return 1.0 - (2.0 / (n * (n - 1))) * total


def _diversity_blas(prints: Sequence[Fingerprint]) -> float:
    """Matrix-product pairwise path for large populations.

    Bit counts stay below 2^24, so float32 dot products are exact integers
    and the correctly-rounded fsum makes both paths bit-identical.
    """
    import numpy as np

    n = len(prints)
    n_bits = prints[0].n_bits
    dense = np.zeros((n, n_bits), dtype=np.float32)
    for i, fp in enumerate(prints):
        if fp.n_bits != n_bits:
            raise LengthMismatchError("mixed fingerprint lengths")
        bits = fp.bits
        idx = []
        while bits:
            low = bits & -bits
            idx.append(low.bit_length() - 1)
            bits ^= low
        dense[i, idx] = 1.0
    inter = dense @ dense.T
    counts = inter.diagonal().copy()
    union = counts[:, None] + counts[None, :] - inter
    iu = np.triu_indices(n, k=1)
    inter_pairs = inter[iu].astype(np.float64)
    union_pairs = union[iu].astype(np.float64)
    sims = np.where(union_pairs == 0.0, 1.0, inter_pairs / np.maximum(union_pairs, 1.0))
    total = math.fsum(sims.tolist())
    return 1.0 - (2.0 / (n * (n - 1))) * total


@dataclass(frozen=True)
class ScalarDescriptors:
    molecular_weight: float
    h_bond_donors: int
    h_bond_acceptors: int
    heavy_atom_count: int


def scalar_descriptors(mol: Molecule) -> ScalarDescriptors:
    """Molecular weight plus N/O-based Rule-of-Five donor/acceptor counts."""
    weight = 0.0
    donors = 0
    acceptors = 0
    for i in range(mol.n_atoms):
        el = mol.element(i)
        weight += ATOMIC_WEIGHT[el] + ATOMIC_WEIGHT["H"] * mol.total_h(i)
        if el in ("N", "O"):
            acceptors += 1
            if mol.total_h(i) >= 1:
                donors += 1
    return ScalarDescriptors(
        molecular_weight=weight,
        h_bond_donors=donors,
        h_bond_acceptors=acceptors,
        heavy_atom_count=mol.n_atoms,
    )
