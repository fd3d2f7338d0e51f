import math

import numpy as np
import pytest

from molbench.scharber import (
    FitDivergedError,
    FrontierEnergies,
    ScharberConfig,
    SpectrumMalformedError,
    calibrate,
    fit_jsc_surrogate,
    incident_power_mw_cm2,
    integrated_jsc_ma_cm2,
    load_spectrum,
    open_circuit_voltage,
    scharber_pce,
)

CHARGE_C = 1.602176634e-19
PLANCK_J_S = 6.62607015e-34
LIGHT_M_S = 2.99792458e8


@pytest.fixture(scope="module")
def spectrum():
    return load_spectrum()


@pytest.fixture(scope="module")
def cfg():
    return ScharberConfig.from_spectrum()


class TestSpectrum:
    def test_bundled_table_loads(self, spectrum):
        wavelength, irradiance = spectrum
        assert wavelength[0] <= 280.0 and wavelength[-1] >= 4000.0
        assert np.all(irradiance >= 0)

    def test_total_power(self, spectrum):
        p_in = incident_power_mw_cm2(*spectrum)
        assert p_in == pytest.approx(100.04, abs=0.05)

    def test_malformed_rejected(self, spectrum):
        wavelength, irradiance = spectrum
        with pytest.raises(SpectrumMalformedError):
            incident_power_mw_cm2(wavelength[:50], irradiance[:50])  # short coverage
        with pytest.raises(SpectrumMalformedError):
            incident_power_mw_cm2(wavelength[::-1], irradiance[::-1])  # not increasing


class TestJscSurrogate:
    def test_fit_within_five_percent(self, spectrum):
        fit = fit_jsc_surrogate(*spectrum)
        assert fit.a_ma_cm2 > 0 and fit.b_ev2 > 0
        assert fit.max_rel_error < 0.05

    def test_zero_gap_limit_equals_total_photon_current(self, spectrum):
        # J(E_G -> 0) must equal q * EQE * total photon flux of the table.
        wavelength, irradiance = spectrum
        eqe = 0.65
        j_total = integrated_jsc_ma_cm2(wavelength, irradiance, np.array([1e-9]), eqe)[0]
        photon_flux = irradiance * (wavelength * 1e-9) / (PLANCK_J_S * LIGHT_M_S)
        expected = CHARGE_C * eqe * np.trapezoid(photon_flux, wavelength) * 0.1
        assert j_total == pytest.approx(expected, rel=1e-9)

    def test_zero_eqe_rejected(self, spectrum):
        with pytest.raises(FitDivergedError):
            fit_jsc_surrogate(*spectrum, eqe=0.0)

    def test_surrogate_tracks_integration(self, spectrum, cfg):
        wavelength, irradiance = spectrum
        gaps = np.linspace(1.0, 4.0, 61)
        reference = integrated_jsc_ma_cm2(wavelength, irradiance, gaps, cfg.eqe)
        for gap, ref in zip(gaps, reference):
            assert cfg.jsc_at_gap(gap) == pytest.approx(ref, rel=0.05)

    def test_monotone_decreasing_in_gap(self, cfg):
        gaps = np.linspace(0.7, 4.2, 100)
        values = [cfg.jsc_at_gap(g) for g in gaps]
        assert all(b < a for a, b in zip(values, values[1:]))


class TestCalibration:
    def test_homo_intercept(self, cfg):
        out = calibrate(FrontierEnergies(homo_ev=0.0, lumo_ev=1.0), cfg)
        assert abs(out.homo_ev - 2.5377) < 1e-12

    def test_lumo_intercept(self, cfg):
        out = calibrate(FrontierEnergies(homo_ev=-5.0, lumo_ev=0.0), cfg)
        assert abs(out.lumo_ev - 3.7913) < 1e-12

    def test_slope_arithmetic(self, cfg):
        out = calibrate(FrontierEnergies(homo_ev=-10.0, lumo_ev=0.0), cfg)
        assert out.homo_ev == pytest.approx(-5.5133, abs=1e-10)

    def test_affinity(self, cfg):
        # calibrate is affine: differences scale exactly with the slope.
        slope = cfg.calib_homo[0]
        for x in (-9.0, -5.0, -1.2):
            a = calibrate(FrontierEnergies(homo_ev=x, lumo_ev=5.0), cfg).homo_ev
            b = calibrate(FrontierEnergies(homo_ev=x + 1.0, lumo_ev=5.0), cfg).homo_ev
            assert b - a == pytest.approx(slope, rel=1e-12)

    def test_gap_recomputed(self, cfg):
        out = calibrate(FrontierEnergies(homo_ev=-6.0, lumo_ev=-2.0), cfg)
        assert out.gap_ev == pytest.approx(out.lumo_ev - out.homo_ev, abs=1e-9)


class TestFrontierEnergies:
    def test_gap_defaulted(self):
        e = FrontierEnergies(homo_ev=-5.0, lumo_ev=-2.0)
        assert e.gap_ev == pytest.approx(3.0)

    def test_rejects_inverted(self):
        with pytest.raises(ValueError):
            FrontierEnergies(homo_ev=-2.0, lumo_ev=-5.0)

    def test_rejects_inconsistent_gap(self):
        with pytest.raises(ValueError):
            FrontierEnergies(homo_ev=-5.0, lumo_ev=-2.0, gap_ev=2.5)


class TestPce:
    def test_voc_donor_reference(self, cfg):
        e = FrontierEnergies(homo_ev=-5.5, lumo_ev=-2.0)
        assert open_circuit_voltage(e, "donor_pcbm", cfg) == pytest.approx(0.9, abs=1e-12)

    def test_negative_voc_clamps(self, cfg):
        e = FrontierEnergies(homo_ev=-4.0, lumo_ev=-3.5)
        assert scharber_pce(e, "donor_pcbm", cfg) == 0.0

    def test_small_lumo_offset_clamps(self, cfg):
        # Donor LUMO less than the overpotential above the acceptor LUMO.
        e = FrontierEnergies(homo_ev=-5.5, lumo_ev=-4.2)
        assert scharber_pce(e, "donor_pcbm", cfg) == 0.0

    def test_acceptor_mode(self, cfg):
        e = FrontierEnergies(homo_ev=-6.5, lumo_ev=-3.5)
        voc = open_circuit_voltage(e, "acceptor_pcdtbt", cfg)
        assert voc == pytest.approx((-3.5) - (-5.5) - 0.3, abs=1e-12)
        assert scharber_pce(e, "acceptor_pcdtbt", cfg) > 0

    def test_pce_non_negative_everywhere(self, cfg):
        import random

        rng = random.Random(0)
        for _ in range(500):
            homo = rng.uniform(-9.0, -2.0)
            lumo = homo + rng.uniform(0.05, 6.0)
            e = FrontierEnergies(homo_ev=homo, lumo_ev=lumo)
            for mode in ("donor_pcbm", "acceptor_pcdtbt"):
                assert scharber_pce(e, mode, cfg) >= 0.0

    def test_monotone_in_voc_at_fixed_jsc(self, cfg):
        # Fixed gap fixes J_SC; deepening the HOMO raises V_OC while the
        # LUMO stays above the acceptor clamp.
        gap = 2.0
        pces = []
        for homo in np.linspace(-5.2, -5.9, 12):
            e = FrontierEnergies(homo_ev=homo, lumo_ev=homo + gap)
            pces.append(scharber_pce(e, "donor_pcbm", cfg))
        assert all(b > a for a, b in zip(pces, pces[1:]))

    def test_monotone_in_jsc_at_fixed_voc(self, cfg):
        # Donor-mode V_OC depends only on the HOMO; shrinking the gap grows
        # J_SC and with it the efficiency.
        pces = []
        for lumo in np.linspace(-2.0, -3.8, 12):
            e = FrontierEnergies(homo_ev=-5.6, lumo_ev=lumo)
            pces.append(scharber_pce(e, "donor_pcbm", cfg))
        assert all(b > a for a, b in zip(pces, pces[1:]))

    def test_interface_gap_variant(self):
        cfg2 = ScharberConfig.from_spectrum(jsc_gap_source="interface")
        e = FrontierEnergies(homo_ev=-5.5, lumo_ev=-3.0)
        donor_mode = scharber_pce(e, "donor_pcbm", cfg2)
        assert donor_mode > 0
        # interface gap = acceptor LUMO - donor HOMO = 1.2 eV
        expected_jsc = cfg2.jsc_at_gap(1.2)
        assert donor_mode == pytest.approx(
            100.0 * 0.9 * cfg2.fill_factor * expected_jsc / cfg2.p_in_mw_cm2, rel=1e-6
        )


class TestConfigPersistence:
    def test_save_load_round_trip(self, cfg, tmp_path):
        path = tmp_path / "scharber.json"
        cfg.save(path)
        again = ScharberConfig.load(path)
        assert again == cfg
