"""Canonical atom ranking and canonical keys.

Ranking is iterative-refinement (Weisfeiler-Lehman style) over an initial
atom invariant, with systematic tie-breaking: every atom of the first tied
class is tried in turn and the lexicographically smallest serialization wins.
The resulting key is stable across runs and invariant under renumbering.  It
is an internal identifier, deliberately not interoperable with any external
toolkit's canonical SMILES.
"""

from __future__ import annotations

from .graph import Molecule
from .smiles import write_smiles

# Tie-break exploration cap; beyond this the best string found so far wins.
# Benchmark-scale molecules stay far below it.
_MAX_LEAVES = 4096


def initial_invariants(mol: Molecule) -> list[tuple]:
    inv = []
    for i in range(mol.n_atoms):
        atom = mol.atoms[i]
        inv.append(
            (
                atom.element,
                mol.degree(i),
                atom.charge,
                mol.total_h(i),
                mol.ring_count(i) > 0,
                mol.is_aromatic_atom(i),
                mol.radical_electrons(i),
            )
        )
    return inv


def _refine(mol: Molecule, ranks: list[int]) -> list[int]:
    n = mol.n_atoms
    n_classes = len(set(ranks))
    while True:
        keys = []
        for i in range(n):
            nbrs = sorted(
                (
                    4 if mol.is_aromatic_bond(b) else mol.bond_order(b),
                    ranks[j],
                )
                for j, b in mol.neighbors(i)
            )
            keys.append((ranks[i], tuple(nbrs)))
        order = {key: r for r, key in enumerate(sorted(set(keys)))}
        new_ranks = [order[k] for k in keys]
        new_classes = len(set(new_ranks))
        if new_classes == n_classes:
            return new_ranks
        ranks = new_ranks
        n_classes = new_classes


def canonical_ranks(mol: Molecule) -> list[int]:
    """Discrete canonical ranks (a permutation of 0..n-1)."""
    _, ranks = _canonical(mol)
    return ranks


def canonical_key(mol: Molecule) -> str:
    """Stable text key; equal for isomorphic graphs, ignores stereo."""
    if mol._canonical_key is None:
        key, _ = _canonical(mol)
        mol._canonical_key = key
    return mol._canonical_key


def _canonical(mol: Molecule) -> tuple[str, list[int]]:
    if mol.n_atoms == 0:
        return "", []
    inv = initial_invariants(mol)
    order = {key: r for r, key in enumerate(sorted(set(inv)))}
    ranks = _refine(mol, [order[k] for k in inv])
    budget = [_MAX_LEAVES]
    result = _search(mol, ranks, budget)
    assert result is not None
    return result


def _search(mol: Molecule, ranks: list[int], budget: list[int]):
    n = mol.n_atoms
    if len(set(ranks)) == n:
        return write_smiles(mol, ranks), ranks
    if budget[0] <= 0:
        return None
    # First tied class by rank value; break it one atom at a time.
    by_rank: dict[int, list[int]] = {}
    for i, r in enumerate(ranks):
        by_rank.setdefault(r, []).append(i)
    tied_rank = min(r for r, members in by_rank.items() if len(members) > 1)
    best = None
    for atom in by_rank[tied_rank]:
        budget[0] -= 1
        bumped = [2 * r for r in ranks]
        bumped[atom] -= 1
        candidate = _search(mol, _refine(mol, bumped), budget)
        if candidate is not None and (best is None or candidate[0] < best[0]):
            best = candidate
        if budget[0] <= 0 and best is not None:
            break
    return best
