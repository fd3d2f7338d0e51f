"""Attributed molecular graph with valence bookkeeping and perception.

A :class:`Molecule` is immutable after construction.  Construction resolves
kekulization of aromatic-flagged input, fills implicit hydrogens against the
valence table and validates every atom.  Ring perception (SSSR), aromaticity
and derived flags are computed lazily and cached; all derived state is a pure
function of the graph, so sharing molecules across threads is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..elements import (
    AROMATIC_CAPABLE,
    SUPPORTED_ELEMENTS,
    allowed_valences,
    charge_adjusted_valence,
)


class MoleculeError(ValueError):
    """Base class for molecular graph errors."""


class SmilesSyntaxError(MoleculeError):
    """Malformed SMILES text."""


class ValenceError(MoleculeError):
    """Atom valence cannot be satisfied (includes kekulization failures)."""


class UnsupportedElementError(MoleculeError):
    """Element outside the supported set."""


# Marker order used for aromatic-flagged bonds before kekulization.
AROMATIC_BOND = -1

_CHARGE_RANGE = range(-4, 5)


@dataclass(frozen=True)
class Atom:
    """Input specification of one atom.

    ``explicit_h`` is ``None`` for bare (organic-subset) atoms whose hydrogen
    count is implied by the valence table, and an explicit count for bracket
    atoms.  ``stereo`` keeps parsed chirality marks as inert annotations.
    """

    element: str
    charge: int = 0
    explicit_h: Optional[int] = None
    aromatic: bool = False
    stereo: Optional[str] = None

    def validate(self) -> None:
        if self.element not in SUPPORTED_ELEMENTS:
            raise UnsupportedElementError(f"unsupported element: {self.element!r}")
        if self.charge not in _CHARGE_RANGE:
            raise ValenceError(f"formal charge {self.charge} outside [-4, +4]")
        if self.explicit_h is not None and self.explicit_h < 0:
            raise ValenceError("negative hydrogen count")
        if self.aromatic and self.element not in AROMATIC_CAPABLE:
            raise ValenceError(f"element {self.element} cannot be aromatic")


@dataclass(frozen=True)
class Bond:
    """Bond between two atom indices; ``order`` is 1, 2, 3 or AROMATIC_BOND."""

    a: int
    b: int
    order: int = 1

    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass(frozen=True)
class Ring:
    """One SSSR ring: ordered atom tuple plus its bond index set."""

    atoms: tuple[int, ...]
    bonds: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.atoms)


class Molecule:
    """Immutable molecular graph.

    Build with :meth:`from_parts`; parsing lives in :mod:`.smiles`.
    """

    __slots__ = (
        "atoms",
        "bonds",
        "_adj",
        "_total_h",
        "_merged_h",
        "_perception",
        "_h_graph",
        "_canonical_key",
    )

    def __init__(
        self,
        atoms: tuple[Atom, ...],
        bonds: tuple[Bond, ...],
        total_h: tuple[int, ...],
        adj: tuple[tuple[tuple[int, int], ...], ...],
    ):
        self.atoms = atoms
        self.bonds = bonds
        self._total_h = total_h
        self._adj = adj
        self._merged_h: tuple[int, ...] = (0,) * len(atoms)
        self._perception: Optional[_Perception] = None
        self._h_graph: Optional[Molecule] = None
        self._canonical_key: Optional[str] = None

    # -- construction -------------------------------------------------

    @classmethod
    def from_parts(
        cls,
        atoms: Sequence[Atom],
        bonds: Sequence[Bond],
        merged_h: Optional[Sequence[int]] = None,
    ) -> "Molecule":
        """Validate, kekulize and hydrogen-fill a raw atom/bond listing.

        ``merged_h`` counts explicit [H] neighbours that were folded into each
        heavy atom by the parser; they occupy valence and add to the hydrogen
        total.
        """
        atoms = tuple(atoms)
        for atom in atoms:
            atom.validate()
        n = len(atoms)
        merged = tuple(merged_h) if merged_h is not None else (0,) * n

        seen: set[tuple[int, int]] = set()
        for bond in bonds:
            if bond.a == bond.b:
                raise MoleculeError("bond endpoints must be distinct")
            if not (0 <= bond.a < n and 0 <= bond.b < n):
                raise MoleculeError("bond endpoint out of range")
            key = bond.key()
            if key in seen:
                raise MoleculeError(f"duplicate bond between atoms {key}")
            seen.add(key)

        bonds = _kekulize(atoms, tuple(bonds))

        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for idx, bond in enumerate(bonds):
            adj[bond.a].append((bond.b, idx))
            adj[bond.b].append((bond.a, idx))

        total_h = []
        for i, atom in enumerate(atoms):
            bond_sum = sum(bonds[bidx].order for _, bidx in adj[i]) + merged[i]
            choices = allowed_valences(atom.element, atom.charge)
            if atom.explicit_h is None:
                fill = next((v for v in choices if v >= bond_sum), None)
                if fill is None:
                    raise ValenceError(
                        f"atom {i} ({atom.element}) bond order sum {bond_sum} "
                        f"exceeds allowed valences {choices}"
                    )
                total_h.append(fill - bond_sum + merged[i])
            else:
                occupied = bond_sum + atom.explicit_h
                if occupied > max(choices):
                    raise ValenceError(
                        f"atom {i} ({atom.element}{atom.charge:+d}) occupies "
                        f"{occupied} > max valence {max(choices)}"
                    )
                total_h.append(atom.explicit_h + merged[i])

        mol = cls(atoms, bonds, tuple(total_h), tuple(tuple(a) for a in adj))
        mol._merged_h = merged
        return mol

    # -- basic accessors ----------------------------------------------

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    def element(self, i: int) -> str:
        return self.atoms[i].element

    def charge(self, i: int) -> int:
        return self.atoms[i].charge

    def total_h(self, i: int) -> int:
        return self._total_h[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def neighbors(self, i: int) -> tuple[tuple[int, int], ...]:
        """Pairs of (neighbor atom index, bond index)."""
        return self._adj[i]

    def bond_between(self, i: int, j: int) -> Optional[int]:
        for nbr, bidx in self._adj[i]:
            if nbr == j:
                return bidx
        return None

    def occupied_valence(self, i: int) -> int:
        return sum(self.bonds[b].order for _, b in self._adj[i]) + self._total_h[i]

    def radical_electrons(self, i: int) -> int:
        atom = self.atoms[i]
        base = charge_adjusted_valence(atom.element, atom.charge)
        return max(0, base - self.occupied_valence(i))

    def net_charge(self) -> int:
        return sum(a.charge for a in self.atoms)

    def n_charged_atoms(self) -> int:
        return sum(1 for a in self.atoms if a.charge != 0)

    def n_radical_electrons(self) -> int:
        return sum(self.radical_electrons(i) for i in range(self.n_atoms))

    # -- perception ---------------------------------------------------

    def _perceive(self) -> "_Perception":
        if self._perception is None:
            self._perception = _Perception(self)
        return self._perception

    @property
    def rings(self) -> tuple[Ring, ...]:
        return self._perceive().rings

    def ring_count(self, i: int) -> int:
        """Number of SSSR rings containing atom ``i``."""
        return self._perceive().atom_ring_count[i]

    def in_ring(self, i: int) -> bool:
        return self._perceive().atom_ring_count[i] > 0

    def bond_in_ring(self, bidx: int) -> bool:
        return bidx in self._perceive().ring_bonds

    def is_aromatic_atom(self, i: int) -> bool:
        return i in self._perceive().aromatic_atoms

    def is_aromatic_bond(self, bidx: int) -> bool:
        return bidx in self._perceive().aromatic_bonds

    def bond_order(self, bidx: int) -> int:
        return self.bonds[bidx].order

    # -- derived graphs -----------------------------------------------

    def with_explicit_h(self) -> "Molecule":
        """Copy of the graph with every hydrogen as a real atom."""
        if self._h_graph is not None:
            return self._h_graph
        atoms = [
            Atom(a.element, a.charge, explicit_h=0, aromatic=a.aromatic, stereo=a.stereo)
            for a in self.atoms
        ]
        bonds = list(self.bonds)
        for i in range(self.n_atoms):
            for _ in range(self._total_h[i]):
                atoms.append(Atom("H", explicit_h=0))
                bonds.append(Bond(i, len(atoms) - 1, 1))
        expanded = Molecule.from_parts(atoms, bonds)
        self._h_graph = expanded
        return expanded

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"<Molecule atoms={self.n_atoms} bonds={self.n_bonds}>"


# -- kekulization -------------------------------------------------------


def _needs_pi_bond(atom: Atom, degree: int, occupied: int, has_exo_multiple: bool) -> bool:
    """Whether an aromatic-flagged atom must receive one double bond.

    Bracket atoms declare their hydrogen count, so the answer follows from
    the free valence alone (covers charged species like [c-], [nH+], [o+]).
    Bare atoms use the conventional reading: carbon takes a double bond,
    two-connected nitrogen is pyridine-like, chalcogens donate a lone pair.
    """
    if atom.explicit_h is not None:
        return occupied + atom.explicit_h < charge_adjusted_valence(
            atom.element, atom.charge
        )
    if has_exo_multiple:
        return False
    el = atom.element
    if el in ("C", "Si", "Sn"):
        return True
    if el in ("N", "P"):
        return degree < 3
    return False  # O, S, B: lone pair or vacant orbital


def _kekulize(atoms: tuple[Atom, ...], bonds: tuple[Bond, ...]) -> tuple[Bond, ...]:
    """Resolve AROMATIC_BOND markers into alternating single/double bonds."""
    aromatic_bond_idx = [i for i, b in enumerate(bonds) if b.order == AROMATIC_BOND]
    if not aromatic_bond_idx:
        return bonds

    n = len(atoms)
    degree = [0] * n
    occupied = [0] * n  # aromatic bonds count one
    exo_multiple = [False] * n
    for b in bonds:
        degree[b.a] += 1
        degree[b.b] += 1
        order = 1 if b.order == AROMATIC_BOND else b.order
        occupied[b.a] += order
        occupied[b.b] += order
        if b.order in (2, 3):
            exo_multiple[b.a] = True
            exo_multiple[b.b] = True

    for idx in aromatic_bond_idx:
        b = bonds[idx]
        if not (atoms[b.a].aromatic and atoms[b.b].aromatic):
            raise ValenceError(
                f"aromatic bond between non-aromatic atoms {b.a}-{b.b}"
            )

    needs = {
        i
        for i, atom in enumerate(atoms)
        if atom.aromatic
        and _needs_pi_bond(atom, degree[i], occupied[i], exo_multiple[i])
    }

    # Adjacency restricted to aromatic-marked bonds between two needy atoms.
    cand: dict[int, list[tuple[int, int]]] = {i: [] for i in needs}
    for idx in aromatic_bond_idx:
        b = bonds[idx]
        if b.a in needs and b.b in needs:
            cand[b.a].append((b.b, idx))
            cand[b.b].append((b.a, idx))

    matched: dict[int, int] = {}

    def assign(pending: frozenset[int]) -> Optional[dict[int, int]]:
        if not pending:
            return dict(matched)
        # Most-constrained-first keeps the backtracking shallow.
        atom = min(pending, key=lambda x: (sum(1 for p, _ in cand[x] if p in pending), x))
        options = [(p, e) for p, e in cand[atom] if p in pending]
        if not options:
            return None
        for partner, edge in options:
            matched[atom] = edge
            matched[partner] = edge
            result = assign(pending - {atom, partner})
            if result is not None:
                return result
            del matched[atom]
            del matched[partner]
        return None

    solution = assign(frozenset(needs))
    if solution is None:
        raise ValenceError("aromatic system cannot be kekulized")

    double_edges = set(solution.values())
    resolved = []
    for idx, b in enumerate(bonds):
        if b.order == AROMATIC_BOND:
            resolved.append(Bond(b.a, b.b, 2 if idx in double_edges else 1))
        else:
            resolved.append(b)
    return tuple(resolved)


# -- ring perception and aromaticity -------------------------------------


class _Perception:
    """Cached SSSR + aromaticity results for one molecule."""

    __slots__ = ("rings", "atom_ring_count", "ring_bonds", "aromatic_atoms", "aromatic_bonds")

    def __init__(self, mol: Molecule):
        self.rings = _sssr(mol)
        counts = [0] * mol.n_atoms
        ring_bonds: set[int] = set()
        for ring in self.rings:
            for a in ring.atoms:
                counts[a] += 1
            ring_bonds |= ring.bonds
        self.atom_ring_count = tuple(counts)
        self.ring_bonds = frozenset(ring_bonds)
        self.aromatic_atoms, self.aromatic_bonds = _perceive_aromatic(mol, self)


def _sssr(mol: Molecule) -> tuple[Ring, ...]:
    """Smallest set of smallest rings via shortest-cycle candidates.

    Candidates are the shortest cycle through every bond; they are selected
    smallest-first under GF(2) independence of their bond sets until the
    cyclomatic number is reached.
    """
    n = mol.n_atoms
    if n == 0:
        return ()
    # Connected components for the cyclomatic number.
    seen = [False] * n
    n_components = 0
    for start in range(n):
        if seen[start]:
            continue
        n_components += 1
        stack = [start]
        seen[start] = True
        while stack:
            cur = stack.pop()
            for nbr, _ in mol.neighbors(cur):
                if not seen[nbr]:
                    seen[nbr] = True
                    stack.append(nbr)
    n_rings = mol.n_bonds - n + n_components
    if n_rings <= 0:
        return ()

    candidates: dict[frozenset[int], tuple[int, ...]] = {}
    for bidx, bond in enumerate(mol.bonds):
        path = _shortest_path_avoiding(mol, bond.a, bond.b, bidx)
        if path is None:
            continue
        atoms = tuple(path)
        bond_set = set()
        ok = True
        for k in range(len(atoms)):
            eidx = mol.bond_between(atoms[k], atoms[(k + 1) % len(atoms)])
            if eidx is None:
                ok = False
                break
            bond_set.add(eidx)
        if ok:
            candidates.setdefault(frozenset(bond_set), atoms)

    ordered = sorted(candidates.items(), key=lambda kv: (len(kv[1]), kv[1]))
    basis: list[int] = []  # bitmask rows, reduced
    chosen: list[Ring] = []
    for bond_set, atoms in ordered:
        if len(chosen) == n_rings:
            break
        vec = 0
        for b in bond_set:
            vec |= 1 << b
        reduced = vec
        for row in basis:
            reduced = min(reduced, reduced ^ row)
        if reduced:
            basis.append(reduced)
            basis.sort(reverse=True)
            chosen.append(Ring(atoms, frozenset(bond_set)))
    return tuple(chosen)


def _shortest_path_avoiding(mol: Molecule, src: int, dst: int, skip_bond: int):
    """BFS path src..dst not using ``skip_bond``; returns atom list or None."""
    prev: dict[int, int] = {src: -1}
    queue = [src]
    while queue:
        nxt: list[int] = []
        for cur in queue:
            for nbr, bidx in mol.neighbors(cur):
                if bidx == skip_bond or nbr in prev:
                    continue
                prev[nbr] = cur
                if nbr == dst:
                    path = [dst]
                    while path[-1] != src:
                        path.append(prev[path[-1]])
                    path.reverse()
                    return path
                nxt.append(nbr)
        queue = nxt
    return None


def _pi_contribution(
    mol: Molecule, i: int, ring_atoms: set[int], atom_ring_count: Sequence[int]
) -> Optional[int]:
    """Electrons atom ``i`` donates to a candidate aromatic ring.

    None means the atom cannot sit in an aromatic ring at all.  The rules
    are restricted to reconstructible textbook cases so every perceived
    aromatic system survives a write/reparse round trip.
    """
    atom = mol.atoms[i]
    el = atom.element
    charge = atom.charge
    connections = mol.degree(i) + mol.total_h(i)
    if connections > 3 or mol.radical_electrons(i) > 0:
        return None
    multiple = [
        (nbr, mol.bonds[b].order)
        for nbr, b in mol.neighbors(i)
        if mol.bonds[b].order >= 2
    ]
    if any(order == 3 for _, order in multiple) or len(multiple) >= 2:
        return None
    if multiple:
        if el == "C" or el == "B":
            allowed = True
        elif el in ("N", "P"):
            allowed = charge >= 0
        elif el in ("O", "S"):
            allowed = charge == 1
        else:
            allowed = False
        if not allowed:
            return None
        partner = multiple[0][0]
        if partner in ring_atoms:
            return 1
        # Double bond into a fused ring keeps the electron in the pi system;
        # a plain exocyclic double bond (quinone-like) removes it.
        return 1 if atom_ring_count[partner] > 0 else 0
    # All-single-bond atoms: lone pairs or vacant orbitals.
    if el in ("N", "P"):
        if (charge == 0 and connections == 3) or (charge == -1 and connections == 2):
            return 2
        return None
    if el in ("O", "S"):
        return 2 if charge == 0 and connections == 2 else None
    if el == "C":
        if charge == -1 and connections == 3:
            return 2
        if charge == 1 and connections == 3:
            return 0
        return None
    if el == "B":
        return 0 if charge == 0 else None
    return None


def _perceive_aromatic(mol: Molecule, perception: _Perception):
    """Hückel 4n+2 per SSSR ring over sp2-capable atoms."""
    aromatic_atoms: set[int] = set()
    aromatic_bonds: set[int] = set()
    for ring in perception.rings:
        ring_set = set(ring.atoms)
        total = 0
        ok = True
        for a in ring.atoms:
            contrib = _pi_contribution(mol, a, ring_set, perception.atom_ring_count)
            if contrib is None:
                ok = False
                break
            total += contrib
        if ok and total >= 2 and total % 4 == 2:
            aromatic_atoms |= ring_set
            aromatic_bonds |= ring.bonds
    return frozenset(aromatic_atoms), frozenset(aromatic_bonds)
