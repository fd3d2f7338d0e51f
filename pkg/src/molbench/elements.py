"""Element data shared by the graph, codec and descriptor layers.

The supported element set is deliberately small: the benchmark datasets are
organic molecules plus the Si/Sn exclusion rules, so anything outside this
table is rejected at parse time.
"""

from __future__ import annotations

SUPPORTED_ELEMENTS = frozenset(
    {"H", "B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I", "Si", "Sn"}
)

# Elements that may be written without brackets in SMILES.
ORGANIC_SUBSET = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})

# Elements that may carry the aromatic (lowercase) flag.
AROMATIC_CAPABLE = frozenset({"B", "C", "N", "O", "P", "S"})

# Allowed total valences for neutral atoms, smallest first.  Implicit
# hydrogens fill up to the smallest entry that fits the explicit bonds.
VALENCE_CHOICES: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "F": (1,),
    "Si": (4,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
    "Sn": (2, 4),
}

# Lowest standard valence, used for radical-electron accounting.
DEFAULT_VALENCE: dict[str, int] = {el: v[0] for el, v in VALENCE_CHOICES.items()}

ATOMIC_NUMBER: dict[str, int] = {
    "H": 1,
    "B": 5,
    "C": 6,
    "N": 7,
    "O": 8,
    "F": 9,
    "Si": 14,
    "P": 15,
    "S": 16,
    "Cl": 17,
    "Br": 35,
    "Sn": 50,
    "I": 53,
}

SYMBOL_BY_NUMBER: dict[int, str] = {n: el for el, n in ATOMIC_NUMBER.items()}

ATOMIC_WEIGHT: dict[str, float] = {
    "H": 1.008,
    "B": 10.811,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "Si": 28.086,
    "P": 30.974,
    "S": 32.06,
    "Cl": 35.45,
    "Br": 79.904,
    "Sn": 118.71,
    "I": 126.904,
}

# Group 13 gains capacity with negative charge, group 14 loses capacity with
# any charge, groups 15-17 shift capacity by the charge sign.
_GROUP_13 = {"B"}
_GROUP_14 = {"C", "Si", "Sn"}


def charge_adjusted_valence(element: str, charge: int, base: int | None = None) -> int:
    """Effective lowest valence of ``element`` carrying ``charge``.

    Examples: N+ -> 4, O- -> 1, C+ -> 3, B- -> 4.  Never below zero.
    """
    if base is None:
        base = DEFAULT_VALENCE[element]
    if element in _GROUP_13:
        adjusted = base - charge
    elif element in _GROUP_14:
        adjusted = base - abs(charge)
    else:
        adjusted = base + charge
    return max(0, adjusted)


def allowed_valences(element: str, charge: int) -> tuple[int, ...]:
    """Valence choices for an atom, shifted for its formal charge."""
    if charge == 0:
        return VALENCE_CHOICES[element]
    shift = charge_adjusted_valence(element, charge) - DEFAULT_VALENCE[element]
    return tuple(max(0, v + shift) for v in VALENCE_CHOICES[element])
