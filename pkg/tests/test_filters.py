import pytest

from molbench.filters import (
    FilterBank,
    MissingDescriptorError,
    ScalarRule,
    apply_filter_bank,
    local_descriptors,
    parse_bank,
    shipped_bank,
)
from molbench.molgraph import parse_smiles

BENZENE = parse_smiles("c1ccccc1")


class TestShippedBankContents:
    def test_docking_bank_rule_set(self):
        bank = shipped_bank("docking")
        rules = {str(rule) for rule in bank.scalars}
        assert rules == {
            "n_charged_atoms == 0",
            "n_radical_electrons == 0",
            "n_bridgehead <= 2",
            "max_ring_size <= 8",
            "mw <= 500",
            "logp <= 5",
            "hbd <= 5",
            "hba <= 10",
            "sascore < 4.5",
            "qed > 0.3",
            "tpsa > 140",
            "alerts_pass == 1",
        }
        names = [label for label, _ in bank.forbidden]
        assert "iodine" in names and "silicon" in names and "tin" in names
        assert len(bank.forbidden) == 31
        assert not bank.required

    def test_emitters_bank_nine_rows(self):
        bank = shipped_bank("emitters")
        rules = {str(rule) for rule in bank.scalars}
        assert rules == {
            "net_charge == 0",
            "n_radical_electrons == 0",
            "n_bridgehead == 0",
            "n_spiro == 0",
            "aromatic_fraction >= 0.5",
            "conjugated_bond_fraction >= 0.7",
            "max_ring_size >= 4",
            "max_ring_size <= 8",
            "min_ring_size >= 4",
            "min_ring_size <= 8",
        }
        assert len(bank.forbidden) == 13

    def test_reactivity_bank_core_plus_moieties(self):
        bank = shipped_bank("reactivity")
        assert [label for label, _ in bank.required] == ["core_motif"]
        assert len(bank.forbidden) == 23
        assert not bank.scalars

    def test_tpsa_override(self):
        default = shipped_bank("docking")
        flipped = shipped_bank("docking", tpsa_practical=True)
        tpsa_default = next(r for r in default.scalars if r.descriptor == "tpsa")
        tpsa_flipped = next(r for r in flipped.scalars if r.descriptor == "tpsa")
        assert (tpsa_default.op, tpsa_default.threshold) == (">", 140.0)
        assert (tpsa_flipped.op, tpsa_flipped.threshold) == ("<=", 140.0)


class TestVerdicts:
    def test_empty_bank_passes_anything(self):
        empty = FilterBank(name="empty")
        for smiles in ("C", "c1ccccc1", "Ic1ccccc1"):
            assert empty.evaluate(parse_smiles(smiles)).passed

    def test_benzene_passes_emitters(self):
        # All nine curation rows evaluated by hand pass for benzene.
        verdict = shipped_bank("emitters").evaluate(BENZENE)
        assert verdict.passed

    def test_violations_are_named(self):
        verdict = shipped_bank("emitters").evaluate(parse_smiles("Cc1ccccc1"))
        assert not verdict.passed
        assert any("methyl" in v for v in verdict.violations)

    def test_missing_descriptor_names_the_descriptor(self):
        bank = shipped_bank("docking")
        values = dict(local_descriptors(BENZENE))
        values.update({"sascore": 1.0, "qed": 0.5, "logp": 1.0, "alerts_pass": 1.0})
        with pytest.raises(MissingDescriptorError) as excinfo:
            apply_filter_bank(BENZENE, bank, values)
        assert "tpsa" in str(excinfo.value)

    def test_pure_function(self):
        bank = shipped_bank("emitters")
        first = bank.evaluate(BENZENE)
        second = bank.evaluate(BENZENE)
        assert first == second


class TestBankFormat:
    def test_parse_custom_bank(self):
        bank = parse_bank(
            """
            bank: custom
            version: 3
            # comment line
            forbid halide [Cl,Br,I]
            require ring C1CCCCC1
            scalar mw <= 250
            """
        )
        assert bank.name == "custom"
        assert bank.version == 3
        assert len(bank.forbidden) == 1
        assert len(bank.required) == 1
        assert str(bank.scalars[0]) == "mw <= 250"

    def test_bad_directive_rejected(self):
        with pytest.raises(ValueError, match="line"):
            parse_bank("frobnicate x y\n")

    def test_with_extra_scalars(self):
        base = shipped_bank("reactivity")
        extended = base.with_extra_scalars([ScalarRule("sascore", "<=", 6.0)], "-sa")
        assert extended.name == "reactivity-sa"
        assert len(extended.scalars) == 1
        assert not base.scalars  # original untouched

    def test_load_bank_from_path(self, tmp_path):
        from molbench.filters import load_bank

        path = tmp_path / "mini.bank"
        path.write_text("bank: mini\nforbid alkyne *#*\n")
        bank = load_bank(path)
        assert bank.name == "mini"
        assert not bank.evaluate(parse_smiles("C#C")).passed


class TestLocalDescriptors:
    def test_covers_every_local_rule_input(self):
        names = set(local_descriptors(BENZENE))
        for bank_name in ("docking", "emitters", "reactivity"):
            bank = shipped_bank(bank_name)
            from molbench.catalog import PROPERTY_UNITS

            local_rules = {
                r.descriptor
                for r in bank.scalars
                if r.descriptor not in PROPERTY_UNITS
            }
            assert local_rules <= names
