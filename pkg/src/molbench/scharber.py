"""Single-junction device-efficiency model for the photovoltaics tasks.

The short-circuit current surrogate J(E_G) = A*exp(-E_G^2/B) is fitted
against trapezoidal integration of the bundled reference solar spectrum;
open-circuit voltage, fill factor and incident power then give the power
conversion efficiency.  Frontier-orbital energies are first mapped through
affine calibration lines before entering the device model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

PLANCK_J_S = 6.62607015e-34
LIGHT_M_S = 2.99792458e8
CHARGE_C = 1.602176634e-19
EV_NM = 1e9 * PLANCK_J_S * LIGHT_M_S / CHARGE_C

# Calibration lines from low-level frontier energies to the reference level
# of theory: slope and intercept (eV).
CALIB_HOMO = (0.8051, 2.5377)
CALIB_LUMO = (0.8788, 3.7913)

ACCEPTOR_LUMO_EV = -4.3   # fullerene acceptor reference level
DONOR_HOMO_EV = -5.5      # polymer donor reference level
OVERPOTENTIAL_EV = 0.3
FILL_FACTOR = 0.65
EQE = 0.65


class SpectrumMalformedError(ValueError):
    pass


class FitDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class FrontierEnergies:
    """HOMO/LUMO energies (eV) plus the gap and dipole moment."""

    homo_ev: float
    lumo_ev: float
    gap_ev: float = None  # type: ignore[assignment]
    dipole_debye: float = 0.0

    def __post_init__(self):
        if self.gap_ev is None:
            object.__setattr__(self, "gap_ev", self.lumo_ev - self.homo_ev)
        if self.lumo_ev <= self.homo_ev:
            raise ValueError("LUMO must lie above HOMO")
        if abs(self.gap_ev - (self.lumo_ev - self.homo_ev)) > 1e-6:
            raise ValueError("gap inconsistent with HOMO/LUMO beyond 1e-6 eV")


@dataclass(frozen=True)
class JscSurrogateFit:
    a_ma_cm2: float
    b_ev2: float
    max_rel_error: float


def load_spectrum(path: Optional[str | Path] = None) -> tuple[np.ndarray, np.ndarray]:
    """Two-column (wavelength nm, irradiance W m^-2 nm^-1) text table."""
    if path is None:
        ref = resources.files("molbench").joinpath("data/am15g.tsv")
        text = ref.read_text()
    else:
        text = Path(path).read_text()
    wavelength = []
    irradiance = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise SpectrumMalformedError(f"line {lineno}: need two columns")
        try:
            wavelength.append(float(parts[0]))
            irradiance.append(float(parts[1]))
        except ValueError as exc:
            raise SpectrumMalformedError(f"line {lineno}: {exc}") from None
    return np.asarray(wavelength), np.asarray(irradiance)


def _validate_spectrum(wavelength: np.ndarray, irradiance: np.ndarray) -> None:
    if wavelength.ndim != 1 or wavelength.shape != irradiance.shape or len(wavelength) < 10:
        raise SpectrumMalformedError("spectrum must be two equal 1-D columns")
    if not np.all(np.diff(wavelength) > 0):
        raise SpectrumMalformedError("wavelength grid must be strictly increasing")
    if wavelength[0] > 280.0 or wavelength[-1] < 4000.0:
        raise SpectrumMalformedError("spectrum must cover at least 280-4000 nm")
    if np.any(irradiance < 0):
        raise SpectrumMalformedError("negative irradiance")


def incident_power_mw_cm2(wavelength: np.ndarray, irradiance: np.ndarray) -> float:
    """Total incident intensity from the full table (mW/cm^2)."""
    _validate_spectrum(wavelength, irradiance)
    return float(np.trapezoid(irradiance, wavelength) * 0.1)


def integrated_jsc_ma_cm2(
    wavelength: np.ndarray,
    irradiance: np.ndarray,
    gaps_ev: np.ndarray,
    eqe: float,
) -> np.ndarray:
    """Trapezoidal above-gap photocurrent for each gap (mA/cm^2)."""
    photon_flux = irradiance * (wavelength * 1e-9) / (PLANCK_J_S * LIGHT_M_S)
    cumulative = np.concatenate(
        [[0.0], np.cumsum(0.5 * (photon_flux[1:] + photon_flux[:-1]) * np.diff(wavelength))]
    )
    lam_gap = EV_NM / np.asarray(gaps_ev, dtype=float)
    flux_above = np.interp(lam_gap, wavelength, cumulative)
    return CHARGE_C * eqe * flux_above * 0.1


def fit_jsc_surrogate(
    wavelength: np.ndarray,
    irradiance: np.ndarray,
    eqe: float = EQE,
    gap_range_ev: tuple[float, float] = (1.0, 4.0),
    n_grid: int = 301,
) -> JscSurrogateFit:
    """Least-squares fit of J = A*exp(-E^2/B) in log space.

    Returns the fitted parameters plus the maximum relative error against
    the trapezoidal integration over the fit grid.
    """
    _validate_spectrum(wavelength, irradiance)
    if not 0.0 < eqe <= 1.0:
        raise FitDivergedError(f"external quantum efficiency {eqe} outside (0, 1]")
    grid = np.linspace(gap_range_ev[0], gap_range_ev[1], n_grid)
    jsc = integrated_jsc_ma_cm2(wavelength, irradiance, grid, eqe)
    if np.any(jsc <= 0.0):
        raise FitDivergedError("zero above-gap photocurrent inside the fit range")
    design = np.stack([np.ones_like(grid), -(grid**2)], axis=1)
    coef, *_ = np.linalg.lstsq(design, np.log(jsc), rcond=None)
    if coef[1] <= 0.0 or not np.isfinite(coef).all():
        raise FitDivergedError("surrogate fit produced non-physical parameters")
    a = float(math.exp(coef[0]))
    b = float(1.0 / coef[1])
    fit = a * np.exp(-(grid**2) / b)
    max_rel = float(np.max(np.abs(fit - jsc) / jsc))
    return JscSurrogateFit(a, b, max_rel)


@dataclass(frozen=True)
class ScharberConfig:
    """Frozen device-model parameters; build once via :meth:`from_spectrum`."""

    a_ma_cm2: float
    b_ev2: float
    p_in_mw_cm2: float
    fill_factor: float = FILL_FACTOR
    eqe: float = EQE
    overpotential_ev: float = OVERPOTENTIAL_EV
    acceptor_lumo_ev: float = ACCEPTOR_LUMO_EV
    donor_homo_ev: float = DONOR_HOMO_EV
    calib_homo: tuple[float, float] = CALIB_HOMO
    calib_lumo: tuple[float, float] = CALIB_LUMO
    # "absorber": J_SC at the molecule's own calibrated gap (all light is
    # absorbed by the designed material); "interface": at the donor-HOMO /
    # acceptor-LUMO gap.
    jsc_gap_source: str = "absorber"
    max_fit_rel_error: float = 0.0
    version: int = 1

    @classmethod
    def from_spectrum(
        cls,
        path: Optional[str | Path] = None,
        eqe: float = EQE,
        jsc_gap_source: str = "absorber",
    ) -> "ScharberConfig":
        wavelength, irradiance = load_spectrum(path)
        fit = fit_jsc_surrogate(wavelength, irradiance, eqe)
        return cls(
            a_ma_cm2=fit.a_ma_cm2,
            b_ev2=fit.b_ev2,
            p_in_mw_cm2=incident_power_mw_cm2(wavelength, irradiance),
            eqe=eqe,
            jsc_gap_source=jsc_gap_source,
            max_fit_rel_error=fit.max_rel_error,
        )

    def jsc_at_gap(self, gap_ev: float) -> float:
        if gap_ev <= 0.0:
            return 0.0
        return self.a_ma_cm2 * math.exp(-(gap_ev**2) / self.b_ev2)

    def save(self, path: str | Path) -> None:
        payload = {
            "version": self.version,
            "a_ma_cm2": self.a_ma_cm2,
            "b_ev2": self.b_ev2,
            "p_in_mw_cm2": self.p_in_mw_cm2,
            "fill_factor": self.fill_factor,
            "eqe": self.eqe,
            "overpotential_ev": self.overpotential_ev,
            "acceptor_lumo_ev": self.acceptor_lumo_ev,
            "donor_homo_ev": self.donor_homo_ev,
            "calib_homo": list(self.calib_homo),
            "calib_lumo": list(self.calib_lumo),
            "jsc_gap_source": self.jsc_gap_source,
            "max_fit_rel_error": self.max_fit_rel_error,
        }
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "ScharberConfig":
        payload = json.loads(Path(path).read_text())
        payload["calib_homo"] = tuple(payload["calib_homo"])
        payload["calib_lumo"] = tuple(payload["calib_lumo"])
        return cls(**payload)


def calibrate(energies: FrontierEnergies, cfg: ScharberConfig) -> FrontierEnergies:
    """Affine calibration of HOMO/LUMO; the gap is recomputed."""
    homo = energies.homo_ev * cfg.calib_homo[0] + cfg.calib_homo[1]
    lumo = energies.lumo_ev * cfg.calib_lumo[0] + cfg.calib_lumo[1]
    return FrontierEnergies(homo_ev=homo, lumo_ev=lumo, dipole_debye=energies.dipole_debye)


def open_circuit_voltage(energies: FrontierEnergies, mode: str, cfg: ScharberConfig) -> float:
    """V_OC with both clamp rules; calibrated energies expected."""
    if mode == "donor_pcbm":
        voc = (cfg.acceptor_lumo_ev - energies.homo_ev) - cfg.overpotential_ev
        # The donor LUMO must sit high enough above the acceptor LUMO for
        # charge separation; otherwise no photovoltage develops.
        if energies.lumo_ev - cfg.acceptor_lumo_ev < cfg.overpotential_ev:
            return 0.0
    elif mode == "acceptor_pcdtbt":
        voc = (energies.lumo_ev - cfg.donor_homo_ev) - cfg.overpotential_ev
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return max(0.0, voc)


def scharber_pce(energies: FrontierEnergies, mode: str, cfg: ScharberConfig) -> float:
    """Power conversion efficiency in percent; clamps yield exactly 0."""
    voc = open_circuit_voltage(energies, mode, cfg)
    if voc == 0.0:
        return 0.0
    if cfg.jsc_gap_source == "absorber":
        gap = energies.gap_ev
    elif cfg.jsc_gap_source == "interface":
        if mode == "donor_pcbm":
            gap = cfg.acceptor_lumo_ev - energies.homo_ev
        else:
            gap = energies.lumo_ev - cfg.donor_homo_ev
    else:
        raise ValueError(f"unknown jsc_gap_source {cfg.jsc_gap_source!r}")
    jsc = cfg.jsc_at_gap(gap)
    return 100.0 * voc * cfg.fill_factor * jsc / cfg.p_in_mw_cm2
