import pytest

from molbench.molgraph import parse_smiles
from molbench.smarts import (
    PatternSyntaxError,
    UnsupportedPatternFeatureError,
    compile_pattern,
    has_match,
)
from molbench.filters import shipped_bank
from molbench.tasks import PARENT_SUBSTRATE_SMILES

from oracles import brute_force_has_match

# Hand-labelled corpus: (pattern, matching SMILES, non-matching SMILES)
HAND_CASES = [
    ("[Cl,Br,I]", "Clc1ccccc1", "c1ccccc1"),
    ("*#*", "C#C", "C=C"),
    ("*=*=*", "C=C=C", "C=CC=C"),
    ("[I]", "Ic1ccccc1", "Clc1ccccc1"),
    ("[S&X3]", "CS(=O)C", "CSC"),
    ("*=[NH]", "C=N", "C=NC"),
    ("*-[CH3]", "CC", "C=C"),
    ("*-[CH2]-*", "CCC", "CC(C)(C)C"),
    ("[*;R1]1~[*]~[*]~[*]1", "C1CCC1", "C1CCCC1"),
    ("[#6](=[#8])[F,Cl,Br,I]", "CC(=O)Cl", "CC(=O)O"),
    ("[C,c]~N=,:[O,o,S,s;!R]", "CN=O", "CNO"),
    ("SS", "CSSC", "CSC"),
    ("NNN", "NNN", "NNC"),
    ("C1CN1", "C1CN1", "C1CCN1"),
    ("N=C=O", "CN=C=O", "CN=CO"),
    ("c1ccccc1", "Cc1ccccc1", "C1CCCCC1"),
    ("[*;!R]", "Cc1ccccc1", "c1ccccc1"),
    ("[*+]", "[NH4+]", "N"),
    ("[O-]", "CC(=O)[O-]", "CC(=O)O"),
    ("*~[P,p](=O)~*", "CP(=O)(C)C", "CPC"),
    ("[N&X5]", "C[N](C)(C)(C)C", "C[N+](C)(C)C"),  # X counts connections incl. H
]


class TestCompile:
    def test_rejects_stereo(self):
        with pytest.raises(UnsupportedPatternFeatureError):
            compile_pattern("[C@@H](F)Cl")

    def test_rejects_component_grouping(self):
        with pytest.raises(UnsupportedPatternFeatureError):
            compile_pattern("C.C")

    def test_rejects_ring_size_primitive(self):
        with pytest.raises(UnsupportedPatternFeatureError):
            compile_pattern("[r5]")

    def test_rejects_malformed(self):
        for bad in ["", "C(", "[X]C", "C=", "[C"]:
            with pytest.raises((PatternSyntaxError, UnsupportedPatternFeatureError)):
                compile_pattern(bad)

    def test_explicit_h_sets_flag(self):
        pattern = compile_pattern("[H]C")
        assert pattern.needs_explicit_h

    def test_recursive_single_level(self):
        pattern = compile_pattern("[$(C=O)]")
        assert has_match(parse_smiles("CC(=O)C"), pattern)
        assert not has_match(parse_smiles("CCO"), pattern)


class TestHandCases:
    @pytest.mark.parametrize("pattern_text,positive,negative", HAND_CASES)
    def test_match_pair(self, pattern_text, positive, negative):
        pattern = compile_pattern(pattern_text)
        assert has_match(parse_smiles(positive), pattern), (pattern_text, positive)
        assert not has_match(parse_smiles(negative), pattern), (pattern_text, negative)


class TestOracleAgreement:
    MOLECULES = [
        "C", "CC", "CCC", "C=C", "C#N", "CCO", "CC(=O)O", "CC(=O)Cl",
        "c1ccccc1", "c1ccncc1", "c1cc[nH]c1", "Cc1ccccc1", "Clc1ccccc1",
        "C1CC1", "C1CCC1", "C1CCCC1", "C1CC2CCC1C2", "CN=C=O", "CSSC",
        "CP(=O)(C)C", "O=[N+]([O-])C", "C=C=C", "CC(C)(C)C", "OCC(O)CO",
        "C1CN1", "s1cccc1", "o1cccc1", "CC(=O)[O-]", "[NH4+]", "FC(F)F",
    ]

    def test_matcher_agrees_with_brute_force(self):
        patterns = [compile_pattern(text) for text, _, _ in HAND_CASES]
        for smiles in self.MOLECULES:
            mol = parse_smiles(smiles)
            for pattern in patterns:
                assert has_match(mol, pattern) == brute_force_has_match(mol, pattern), (
                    smiles,
                    pattern.text,
                )


class TestCoreMotif:
    def test_parent_substrate_matches(self):
        bank = shipped_bank("reactivity")
        label, core = bank.required[0]
        assert label == "core_motif"
        assert has_match(parse_smiles(PARENT_SUBSTRATE_SMILES), core)

    def test_small_molecules_do_not_match(self):
        bank = shipped_bank("reactivity")
        _, core = bank.required[0]
        for smiles in ["c1ccccc1", "C1CC2CCC1C2", "CCO"]:
            assert not has_match(parse_smiles(smiles), core)

    def test_substituted_core_still_matches(self):
        bank = shipped_bank("reactivity")
        _, core = bank.required[0]
        # Methyl on one of the wildcard substitution sites.
        substituted = parse_smiles("CC1C2C34C5C=CC(C5)C3(C4)C(C2)C1")
        assert has_match(substituted, core)


class TestMonotonicity:
    def test_adding_forbidden_pattern_never_unfails(self):
        from molbench.filters import FilterBank

        molecules = [parse_smiles(s) for s in ["CCO", "c1ccccc1", "CC(=O)Cl", "C#C"]]
        base = FilterBank(name="base", forbidden=[("halide", compile_pattern("[Cl,Br,I]"))])
        extended = FilterBank(
            name="ext",
            forbidden=base.forbidden + [("alkyne", compile_pattern("*#*"))],
        )
        for mol in molecules:
            before = base.evaluate(mol).passed
            after = extended.evaluate(mol).passed
            assert not (after and not before)
