"""Molecular graph layer: parsing, writing, canonical keys, perception."""

from .graph import (
    AROMATIC_BOND,
    Atom,
    Bond,
    Molecule,
    MoleculeError,
    Ring,
    SmilesSyntaxError,
    UnsupportedElementError,
    ValenceError,
)
from .smiles import parse_smiles, write_smiles
from .canon import canonical_key, canonical_ranks
from .perceive import PerceptionReport, perceive

__all__ = [
    "AROMATIC_BOND",
    "Atom",
    "Bond",
    "Molecule",
    "MoleculeError",
    "PerceptionReport",
    "Ring",
    "SmilesSyntaxError",
    "UnsupportedElementError",
    "ValenceError",
    "canonical_key",
    "canonical_ranks",
    "parse_smiles",
    "perceive",
    "write_smiles",
]
