"""Guaranteed-validity molecular string codec and mutation operators.

Every token sequence over the alphabet decodes to a valence-consistent
molecule: bond orders are clipped to the remaining capacity of both
endpoints, branches and rings that cannot be realized degrade to no-ops and
trailing fragments are truncated.  Encoding inverts decoding exactly, so
``decode(encode(m))`` is graph-isomorphic to ``m``.

The token set follows the published derivation-rule semantics (atom symbols
with bond-order prefixes, branch symbols and ring symbols with
length-encoding successor tokens) but is an internal dialect: compatibility
with any specific published token table is a non-goal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from random import Random
from typing import Callable, Iterator, Optional, Sequence

from .elements import charge_adjusted_valence
from .molgraph import Atom, Bond, Molecule, UnsupportedElementError, canonical_key, write_smiles


class CodecError(ValueError):
    """Raised for malformed token text (never raised by decode itself)."""


class PredicateNeverSatisfiedError(RuntimeError):
    """Dataset expansion produced zero survivors in its first full cycle."""


# Maximum bonding capacity per element; the codec's own valence table.
CODEC_CAPACITY: dict[str, int] = {
    "B": 3,
    "C": 4,
    "N": 3,
    "O": 2,
    "S": 6,
    "P": 5,
    "F": 1,
    "Cl": 1,
    "Br": 1,
    "I": 1,
}

_ORDER_PREFIX = {"": 1, "=": 2, "#": 3}
_PREFIX_FOR_ORDER = {1: "", 2: "=", 3: "#"}

_ATOM_TOKEN = re.compile(
    r"^\[([=#]?)(B|C|N|O|S|P|F|Cl|Br|I)(?:H(\d))?(?:([+-])(\d))?\]$"
)
_BRANCH_TOKEN = re.compile(r"^\[Branch([123])\]$")
_RING_TOKEN = re.compile(r"^\[([=#]?)Ring([123])\]$")

# Mutation alphabet: a curated subset of everything decode understands.
ALPHABET: tuple[str, ...] = (
    "[C]", "[=C]", "[#C]",
    "[N]", "[=N]", "[#N]",
    "[O]", "[=O]",
    "[B]", "[=B]",
    "[S]", "[=S]",
    "[P]", "[=P]",
    "[F]", "[Cl]", "[Br]", "[I]",
    "[C+1]", "[C-1]", "[N+1]", "[=N+1]", "[N-1]", "[O+1]", "[O-1]",
    "[S+1]", "[S-1]",
    "[CH1]", "[CH2]", "[CH3]", "[NH1]", "[OH1]",
    "[Branch1]", "[Branch2]", "[Branch3]",
    "[Ring1]", "[Ring2]", "[=Ring1]", "[=Ring2]", "[#Ring1]",
)

# Fixed 16-symbol table for branch/ring length encoding; tokens outside the
# table contribute zero.
INDEX_TOKENS: tuple[str, ...] = (
    "[C]", "[Ring1]", "[Ring2]", "[Branch1]", "[Branch2]", "[Branch3]",
    "[=C]", "[#C]", "[N]", "[=N]", "[O]", "[=O]", "[S]", "[P]", "[F]", "[Cl]",
)
_INDEX_OF = {tok: i for i, tok in enumerate(INDEX_TOKENS)}


@dataclass(frozen=True)
class SelfiesSequence:
    """Immutable token sequence."""

    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, item):
        return self.tokens[item]

    def to_text(self) -> str:
        return "".join(self.tokens)

    @classmethod
    def from_text(cls, text: str) -> "SelfiesSequence":
        return cls(tuple(split_tokens(text)))


def split_tokens(text: str) -> list[str]:
    """Split concatenated bracket tokens; validates bracket pairing only."""
    text = text.strip()
    tokens = []
    i = 0
    while i < len(text):
        if text[i] != "[":
            raise CodecError(f"expected '[' at position {i} of {text!r}")
        end = text.find("]", i)
        if end < 0:
            raise CodecError("unterminated token")
        tokens.append(text[i : end + 1])
        i = end + 1
    return tokens


@dataclass(frozen=True)
class _AtomSpec:
    order: int
    element: str
    charge: int
    forced_h: Optional[int]

    @property
    def capacity(self) -> int:
        cap = charge_adjusted_valence(self.element, self.charge, CODEC_CAPACITY[self.element])
        if self.forced_h is not None:
            cap -= self.forced_h
        return max(0, cap)


def _parse_token(token: str):
    """Classify one token: ('atom', spec) | ('branch', L) | ('ring', L, order)."""
    m = _ATOM_TOKEN.match(token)
    if m:
        prefix, element, forced_h, sign, magnitude = m.groups()
        charge = 0
        if sign:
            charge = int(magnitude) * (1 if sign == "+" else -1)
        return (
            "atom",
            _AtomSpec(
                _ORDER_PREFIX[prefix],
                element,
                charge,
                int(forced_h) if forced_h is not None else None,
            ),
        )
    m = _BRANCH_TOKEN.match(token)
    if m:
        return ("branch", int(m.group(1)))
    m = _RING_TOKEN.match(token)
    if m:
        return ("ring", int(m.group(2)), _ORDER_PREFIX[m.group(1)])
    raise CodecError(f"unrecognized token {token!r}")


def _index_value(tokens: Sequence[str]) -> int:
    value = 0
    for tok in tokens:
        value = value * 16 + _INDEX_OF.get(tok, 0)
    return value


def _index_symbols(value: int) -> list[str]:
    """Shortest INDEX_TOKENS encoding of ``value`` (1..3 symbols)."""
    if value < 16:
        digits = [value]
    elif value < 256:
        digits = [value // 16, value % 16]
    else:
        if value >= 4096:
            raise CodecError(f"length {value} exceeds three index symbols")
        digits = [value // 256, (value // 16) % 16, value % 16]
    return [INDEX_TOKENS[d] for d in digits]


class _Builder:
    """Shared graph state across chain and branch derivation frames."""

    __slots__ = ("elements", "charges", "forced_h", "caps", "bonds", "bond_keys")

    def __init__(self) -> None:
        self.elements: list[str] = []
        self.charges: list[int] = []
        self.forced_h: list[Optional[int]] = []
        self.caps: list[int] = []
        self.bonds: list[tuple[int, int, int]] = []
        self.bond_keys: set[tuple[int, int]] = set()

    def add_atom(self, spec: _AtomSpec) -> int:
        self.elements.append(spec.element)
        self.charges.append(spec.charge)
        self.forced_h.append(spec.forced_h)
        self.caps.append(spec.capacity)
        return len(self.elements) - 1

    def add_bond(self, a: int, b: int, order: int) -> None:
        key = (a, b) if a < b else (b, a)
        self.bonds.append((a, b, order))
        self.bond_keys.add(key)
        self.caps[a] -= order
        self.caps[b] -= order

    def has_bond(self, a: int, b: int) -> bool:
        key = (a, b) if a < b else (b, a)
        return key in self.bond_keys


def _derive(builder: _Builder, tokens: Sequence[str], attach_to: Optional[int]) -> None:
    current = attach_to
    i = 0
    n = len(tokens)
    while i < n:
        parsed = _parse_token(tokens[i])
        i += 1
        kind = parsed[0]
        if kind == "atom":
            spec = parsed[1]
            if current is None:
                current = builder.add_atom(spec)
                continue
            if builder.caps[current] == 0:
                break  # dead state: no further growth from this chain
            order = min(spec.order, builder.caps[current], spec.capacity)
            if order == 0:
                continue
            new = builder.add_atom(spec)
            builder.add_bond(current, new, order)
            current = new
        elif kind == "branch":
            length_symbols = parsed[1]
            index = tokens[i : i + length_symbols]
            i += length_symbols
            if current is None or builder.caps[current] <= 1:
                continue
            content_len = _index_value(index) + 1
            content = tokens[i : i + content_len]
            i += content_len
            _derive(builder, content, current)
        else:  # ring
            length_symbols, order = parsed[1], parsed[2]
            index = tokens[i : i + length_symbols]
            i += length_symbols
            if current is None:
                continue
            distance = _index_value(index) + 1
            target = max(0, current - distance)
            if target == current or builder.has_bond(current, target):
                continue
            bond = min(order, builder.caps[current], builder.caps[target])
            if bond == 0:
                continue
            builder.add_bond(current, target, bond)


def decode(sequence: SelfiesSequence | Sequence[str]) -> Molecule:
    """Total decoder: any alphabet token sequence yields a valid Molecule."""
    tokens = tuple(sequence.tokens if isinstance(sequence, SelfiesSequence) else sequence)
    builder = _Builder()
    _derive(builder, tokens, None)
    atoms = [
        Atom(el, charge=chg, explicit_h=fh)
        for el, chg, fh in zip(builder.elements, builder.charges, builder.forced_h)
    ]
    bonds = [Bond(a, b, order) for a, b, order in builder.bonds]
    return Molecule.from_parts(atoms, bonds)


def _atom_token_text(mol: Molecule, i: int, order: int) -> str:
    atom = mol.atoms[i]
    element = atom.element
    if element not in CODEC_CAPACITY:
        raise UnsupportedElementError(f"element {element} not representable")
    body = _PREFIX_FOR_ORDER[order] + element
    charge = atom.charge
    cap = charge_adjusted_valence(element, charge, CODEC_CAPACITY[element])
    bond_sum = sum(mol.bond_order(b) for _, b in mol.neighbors(i))
    if bond_sum > cap:
        raise UnsupportedElementError(
            f"atom {i} ({element}) exceeds codec capacity {cap}"
        )
    # Emit an explicit hydrogen count only where implicit filling would not
    # reproduce the molecule (radical centres).
    implied = _implied_h(element, charge, bond_sum)
    if mol.total_h(i) != implied:
        body += f"H{mol.total_h(i)}"
    if charge:
        body += f"{'+' if charge > 0 else '-'}{abs(charge)}"
    return f"[{body}]"


def _implied_h(element: str, charge: int, bond_sum: int) -> int:
    from .elements import allowed_valences

    for v in allowed_valences(element, charge):
        if v >= bond_sum:
            return v - bond_sum
    return 0


def encode(mol: Molecule) -> SelfiesSequence:
    """Encode a molecule; raises UnsupportedElementError outside the alphabet."""
    if mol.n_atoms == 0:
        return SelfiesSequence(())

    # Spanning DFS in index order; back edges become ring tokens.
    tree_children: list[list[tuple[int, int]]] = [[] for _ in range(mol.n_atoms)]
    back_edges: list[list[int]] = [[] for _ in range(mol.n_atoms)]
    visited = [False] * mol.n_atoms
    used: set[int] = set()

    import sys

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, mol.n_atoms * 4 + 200))
    try:

        def dfs(atom: int) -> None:
            visited[atom] = True
            for nbr, bidx in mol.neighbors(atom):
                if bidx in used:
                    continue
                used.add(bidx)
                if visited[nbr]:
                    back_edges[atom].append(nbr)
                else:
                    tree_children[atom].append((nbr, bidx))
                    dfs(nbr)

        dfs(0)
        if not all(visited):
            raise UnsupportedElementError("disconnected graphs are not representable")

        position: dict[int, int] = {}
        counter = [0]

        def emit(atom: int, via_order: int) -> list[str]:
            position[atom] = counter[0]
            counter[0] += 1
            tokens = [_atom_token_text(mol, atom, via_order)]
            for target in back_edges[atom]:
                order = mol.bond_order(mol.bond_between(atom, target))
                distance = position[atom] - position[target]
                prefix = _PREFIX_FOR_ORDER[order]
                symbols = _index_symbols(distance - 1)
                tokens.append(f"[{prefix}Ring{len(symbols)}]")
                tokens.extend(symbols)
            children = tree_children[atom]
            for k, (nbr, bidx) in enumerate(children):
                sub = emit(nbr, mol.bond_order(bidx))
                if k < len(children) - 1:
                    symbols = _index_symbols(len(sub) - 1)
                    tokens.append(f"[Branch{len(symbols)}]")
                    tokens.extend(symbols)
                    tokens.extend(sub)
                else:
                    tokens.extend(sub)
            return tokens

        out = emit(0, 1)
    finally:
        sys.setrecursionlimit(limit)
    return SelfiesSequence(tuple(out))


# -- stochastic operators ---------------------------------------------------


def mutate(
    sequence: SelfiesSequence,
    rng_seed: int,
    ops: Sequence[str] = ("insert", "delete", "replace"),
    alphabet: Sequence[str] = ALPHABET,
) -> SelfiesSequence:
    """Single-token edit at a uniformly chosen position; always decodable."""
    rng = Random(rng_seed)
    tokens = list(sequence.tokens)
    available = [op for op in ops if op != "delete" or len(tokens) > 0]
    if not tokens:
        available = ["insert"]
    op = rng.choice(available)
    if op == "insert":
        pos = rng.randrange(len(tokens) + 1)
        tokens.insert(pos, rng.choice(alphabet))
    elif op == "delete":
        pos = rng.randrange(len(tokens))
        del tokens[pos]
    else:
        pos = rng.randrange(len(tokens))
        old = tokens[pos]
        choices = [t for t in alphabet if t != old]
        tokens[pos] = rng.choice(choices)
    return SelfiesSequence(tuple(tokens))


ATOM_TOKENS: tuple[str, ...] = tuple(
    t for t in ALPHABET if _ATOM_TOKEN.match(t) is not None
)


def crossover(a: SelfiesSequence, b: SelfiesSequence, rng_seed: int) -> SelfiesSequence:
    """Single-point splice: prefix of ``a`` plus suffix of ``b``."""
    rng = Random(rng_seed)
    cut = rng.randint(0, min(len(a), len(b)))
    return SelfiesSequence(tuple(a.tokens[:cut]) + tuple(b.tokens[cut:]))


def random_sequence(length: int, rng: Random) -> SelfiesSequence:
    """Uniform token sequence, for fuzzing and sampling."""
    return SelfiesSequence(tuple(rng.choice(ALPHABET) for _ in range(length)))


def randomized_smiles(mol: Molecule, n: int, rng_seed: int) -> list[str]:
    """``n`` SMILES strings from random atom-order traversals of ``mol``."""
    rng = Random(rng_seed)
    out = []
    for _ in range(n):
        perm = list(range(mol.n_atoms))
        rng.shuffle(perm)
        out.append(write_smiles(mol, perm))
    return out


def expand_dataset(
    seed: Molecule,
    keep_predicate: Callable[[Molecule], bool],
    reorderings: int,
    mutations_per: int,
    target_size: int,
    rng_seed: int,
) -> list[Molecule]:
    """Breadth-first mutation cycles from ``seed``.

    Per cycle, every frontier molecule is rewritten as ``reorderings`` random
    SMILES, each re-encoded and mutated ``mutations_per`` times; survivors are
    the unique decodes passing ``keep_predicate``.  Stops at ``target_size``
    or when a cycle adds nothing.  Raises PredicateNeverSatisfiedError when
    the very first cycle has zero survivors.
    """
    from .molgraph import parse_smiles

    if not keep_predicate(seed):
        raise PredicateNeverSatisfiedError("seed molecule fails the keep predicate")
    rng = Random(rng_seed)
    collected: dict[str, Molecule] = {canonical_key(seed): seed}
    frontier = [seed]
    first_cycle = True
    while len(collected) < target_size and frontier:
        survivors: list[Molecule] = []
        for mol in frontier:
            for smi in randomized_smiles(mol, reorderings, rng.getrandbits(32)):
                try:
                    base = encode(parse_smiles(smi))
                except (ValueError, RecursionError):
                    continue
                for _ in range(mutations_per):
                    candidate = decode(mutate(base, rng.getrandbits(32)))
                    if candidate.n_atoms == 0:
                        continue
                    try:
                        key = canonical_key(candidate)
                    except ValueError:
                        continue
                    if key in collected:
                        continue
                    if not keep_predicate(candidate):
                        continue
                    collected[key] = candidate
                    survivors.append(candidate)
                    if len(collected) >= target_size:
                        return list(collected.values())
        if first_cycle and not survivors:
            raise PredicateNeverSatisfiedError(
                "no mutant passed the keep predicate in a full cycle"
            )
        first_cycle = False
        frontier = survivors
    return list(collected.values())
