import math
import random

import pytest

from molbench.descriptors import (
    Fingerprint,
    LengthMismatchError,
    PopulationTooSmallError,
    diversity,
    diversity_from_fingerprints,
    morgan_fingerprint,
    scalar_descriptors,
    tanimoto,
)
from molbench.molgraph import parse_smiles, write_smiles

from oracles import pairwise_diversity

CORPUS = [
    "C", "CCO", "c1ccccc1", "CC(=O)Oc1ccccc1C(=O)O", "C1CC2CCC1CC2",
    "c1ccncc1", "CC(C)(C)c1ccc(O)cc1", "N#Cc1ccccc1", "O=S(=O)(O)O",
    "c1ccc2[nH]ccc2c1", "ClCCCl", "OCC(O)CO",
]


class TestFingerprint:
    def test_identical_molecules_identical_prints(self):
        a = morgan_fingerprint(parse_smiles("C"))
        b = morgan_fingerprint(parse_smiles("C"))
        assert a == b

    def test_renumbering_invariance(self):
        rng = random.Random(17)
        for smiles in CORPUS:
            mol = parse_smiles(smiles)
            base = morgan_fingerprint(mol)
            for _ in range(100):
                perm = list(range(mol.n_atoms))
                rng.shuffle(perm)
                again = morgan_fingerprint(parse_smiles(write_smiles(mol, perm)))
                assert again == base, smiles

    def test_duplicate_beats_unrelated(self):
        ethanol = morgan_fingerprint(parse_smiles("CCO"))
        duplicate = morgan_fingerprint(parse_smiles("OCC"))
        benzene = morgan_fingerprint(parse_smiles("c1ccccc1"))
        assert tanimoto(ethanol, duplicate) == 1.0
        assert tanimoto(ethanol, duplicate) > tanimoto(ethanol, benzene)

    def test_shape(self):
        fp = morgan_fingerprint(parse_smiles("CCO"))
        assert fp.n_bits == 2048
        assert fp.radius == 3
        assert 0 < fp.count() < 2048

    def test_hex_round_trip(self):
        fp = morgan_fingerprint(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"))
        assert Fingerprint.from_hex(fp.to_hex()) == fp


class TestTanimoto:
    def test_self_similarity(self):
        fp = morgan_fingerprint(parse_smiles("CCO"))
        assert tanimoto(fp, fp) == 1.0

    def test_disjoint(self):
        assert tanimoto(Fingerprint(0b1100), Fingerprint(0b0011)) == 0.0

    def test_half(self):
        assert tanimoto(Fingerprint(0b0110), Fingerprint(0b1100)) == pytest.approx(1 / 3)
        assert tanimoto(Fingerprint(0b0011), Fingerprint(0b1111)) == 0.5

    def test_both_empty(self):
        assert tanimoto(Fingerprint(0), Fingerprint(0)) == 1.0

    def test_symmetry(self):
        rng = random.Random(3)
        prints = [morgan_fingerprint(parse_smiles(s)) for s in CORPUS]
        for _ in range(50):
            a, b = rng.choice(prints), rng.choice(prints)
            assert tanimoto(a, b) == tanimoto(b, a)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            tanimoto(Fingerprint(1, n_bits=2048), Fingerprint(1, n_bits=1024))


class TestDiversity:
    def test_identical_population_zero(self):
        pop = [parse_smiles("CCO") for _ in range(5)]
        assert diversity(pop) == 0.0

    def test_two_molecules_half_similarity(self):
        a = Fingerprint(0b0011)
        b = Fingerprint(0b0110)  # intersection 1, union 3
        value = diversity_from_fingerprints([a, b])
        assert value == pytest.approx(1 - 1 / 3)

    def test_matches_brute_force(self):
        rng = random.Random(11)
        for trial in range(20):
            population = [parse_smiles(rng.choice(CORPUS)) for _ in range(rng.randint(2, 20))]
            prints = [morgan_fingerprint(m) for m in population]
            assert abs(diversity(population) - pairwise_diversity(prints)) <= 1e-12

    def test_population_too_small(self):
        with pytest.raises(PopulationTooSmallError):
            diversity([parse_smiles("C")])

    def test_bounds(self):
        rng = random.Random(5)
        for _ in range(10):
            population = [parse_smiles(rng.choice(CORPUS)) for _ in range(6)]
            assert 0.0 <= diversity(population) <= 1.0

    def test_blas_path_matches_loop_path(self):
        rng = random.Random(7)
        prints = [morgan_fingerprint(parse_smiles(rng.choice(CORPUS))) for _ in range(300)]
        fast = diversity_from_fingerprints(prints)
        slow = 1.0 - (2.0 / (300 * 299)) * math.fsum(
            tanimoto(prints[i], prints[j]) for i in range(300) for j in range(i + 1, 300)
        )
        assert fast == slow


class TestScalarDescriptors:
    def test_water(self):
        d = scalar_descriptors(parse_smiles("O"))
        assert d.molecular_weight == pytest.approx(18.015, abs=0.01)
        assert d.h_bond_donors == 1
        assert d.h_bond_acceptors == 1

    def test_methane(self):
        d = scalar_descriptors(parse_smiles("C"))
        assert d.h_bond_donors == 0
        assert d.h_bond_acceptors == 0
        assert d.heavy_atom_count == 1

    def test_ethanol(self):
        d = scalar_descriptors(parse_smiles("CCO"))
        assert d.molecular_weight == pytest.approx(46.069, abs=0.01)
        assert d.h_bond_donors == 1
        assert d.h_bond_acceptors == 1
