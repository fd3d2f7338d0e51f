"""Resource-constrained benchmarking harness for inverse molecular design.

Layers, bottom up: molecular graphs (`molgraph`), the validity-guaranteed
string codec (`selfies`), pattern matching (`smarts`) and filter banks
(`filters`), fingerprints and descriptors (`descriptors`), the device model
(`scharber`), outlier envelope (`envelope`) and task objectives (`tasks`),
the provider/cache/budget boundary (`providers`), reference optimizers
(`optimizers`) and the benchmark protocol (`bench`, `datasets`, `reports`,
`cli`).
"""

from .molgraph import (
    Molecule,
    canonical_key,
    parse_smiles,
    perceive,
    write_smiles,
)
from .selfies import SelfiesSequence, decode, encode

__version__ = "0.1.0"

__all__ = [
    "Molecule",
    "SelfiesSequence",
    "canonical_key",
    "decode",
    "encode",
    "parse_smiles",
    "perceive",
    "write_smiles",
    "__version__",
]
