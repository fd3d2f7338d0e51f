"""Structural alert list for the alerts_pass descriptor.

A curated union of pan-assay interference motifs and classic
reactive/unstable-group filters, limited to the pattern grammar the matcher
supports.  The revision tag travels in the handshake so consumers can pin
results to a rule set.
"""

from __future__ import annotations

from molbench.molgraph import Molecule
from molbench.smarts import compile_pattern, has_match

ALERTS_VERSION = "builtin-pains-mcf-2024.1"

ALERT_SMARTS: list[tuple[str, str]] = [
    ("quinone_a", "O=C1C=CC(=O)C=C1"),
    ("quinone_b", "O=C1C(=O)C=CC=C1"),
    ("catechol", "Oc1ccccc1O"),
    ("hydroquinone", "Oc1ccc(O)cc1"),
    ("azo_aromatic", "cN=Nc"),
    ("hydrazine", "NN"),
    ("hydrazone", "C=NN"),
    ("enone_michael", "C=CC=O"),
    ("ynone", "C#CC=O"),
    ("aldehyde", "[CH1]=O"),
    ("thiol", "[SH]"),
    ("disulfide", "SS"),
    ("peroxide", "OO"),
    ("epoxide", "C1CO1"),
    ("aziridine", "C1CN1"),
    ("acyl_halide", "C(=O)[F,Cl,Br,I]"),
    ("sulfonyl_halide", "S(=O)(=O)[F,Cl,Br,I]"),
    ("anhydride", "C(=O)OC(=O)"),
    ("isocyanate", "N=C=O"),
    ("isothiocyanate", "N=C=S"),
    ("thiourea", "NC(=S)N"),
    ("rhodanine_like", "O=C1CSC(=S)N1"),
    ("nitroso", "[N+]([O-])=C"),
    ("alkyl_halide_activated", "[N,O,S]CC[Cl,Br,I]"),
    ("imine_reactive", "C=[NH]"),
    ("cumulated_diene", "*=*=*"),
    ("phosphorus_ylide", "C=[P,p]"),
    ("beta_lactone", "O=C1CCO1"),
    ("maleimide", "O=C1C=CC(=O)N1"),
]

_COMPILED = [(name, compile_pattern(text)) for name, text in ALERT_SMARTS]


def alerts_pass(mol: Molecule) -> bool:
    """True when no alert motif is present."""
    return not any(has_match(mol, pattern) for _, pattern in _COMPILED)


def matched_alerts(mol: Molecule) -> list[str]:
    return [name for name, pattern in _COMPILED if has_match(mol, pattern)]
