"""Unit conventions, baseline parameters and derived scalars shared by every module."""

import math
from typing import Tuple

import numpy as np

from ..schemas import (
    TWO_PI,
    Detunings,
    InitialConditions,
    PumpConfig,
    SystemConfig,
)

# Acoustic baseline: modes at 1460 and 1240 Hz, coupling chosen so that the
# resonant difference-pump gain rate is 2π·10 rad/s at A0 = 1.
BASELINE_OMEGA_E_HZ = 1460.0
BASELINE_OMEGA_G_HZ = 1240.0
BASELINE_CHI = 1.0625e6
BASELINE_A0 = 1.0


def hz_to_rad(freq_hz: float) -> float:
    return TWO_PI * freq_hz


def rad_to_hz(omega: float) -> float:
    return omega / TWO_PI


def baseline_system(symmetry: int = -1, chi: float = BASELINE_CHI) -> SystemConfig:
    """Baseline modes with χ_e = +χ and χ_g = symmetry·χ."""
    if symmetry not in (-1, 1):
        raise ValueError("symmetry must be +1 or -1")
    return SystemConfig.from_hz(
        BASELINE_OMEGA_E_HZ, BASELINE_OMEGA_G_HZ, chi_e=chi, chi_g=symmetry * chi
    )


def difference_pump(cfg: SystemConfig, amplitude_a0: float = BASELINE_A0, offset_hz: float = 0.0) -> PumpConfig:
    return PumpConfig(amplitude_a0=amplitude_a0, nu=cfg.delta_omega + hz_to_rad(offset_hz))


def sum_pump(cfg: SystemConfig, amplitude_a0: float = BASELINE_A0, offset_hz: float = 0.0) -> PumpConfig:
    return PumpConfig(amplitude_a0=amplitude_a0, nu=cfg.sigma_omega + hz_to_rad(offset_hz))


def derived_detunings(cfg: SystemConfig, pump: PumpConfig) -> Detunings:
    """Δ = ν − (ω_e − ω_g), Δ_s = ν − (ω_e + ω_g)."""
    return Detunings(
        delta=pump.nu - (cfg.omega_e - cfg.omega_g),
        delta_s=pump.nu - (cfg.omega_e + cfg.omega_g),
    )


def symmetry_relation(cfg: SystemConfig) -> int:
    """Sign of χ_e·χ_g; 0 when either coupling is exactly zero."""
    product = cfg.chi_e * cfg.chi_g
    if product > 0.0:
        return 1
    if product < 0.0:
        return -1
    return 0


def coupling_scale(cfg: SystemConfig) -> float:
    """√(ω_eω_g/|χ_eχ_g|); the pump threshold is a multiple of this times |detuning|."""
    product = abs(cfg.chi_e * cfg.chi_g)
    return math.sqrt(cfg.omega_e * cfg.omega_g / product)


def resonant_gain_magnitude(cfg: SystemConfig, amplitude_a0: float) -> float:
    """|Ω| at exact resonance: A0√|χ_eχ_g| / (2√(ω_eω_g))."""
    return amplitude_a0 * math.sqrt(abs(cfg.chi_e * cfg.chi_g)) / (
        2.0 * math.sqrt(cfg.omega_e * cfg.omega_g)
    )


def pump_field(pump: PumpConfig, t: np.ndarray) -> np.ndarray:
    """E_p(t) = A0 cos(νt + φ)."""
    return pump.amplitude_a0 * np.cos(pump.nu * np.asarray(t, dtype=float) + pump.phi)


def phase_space_initial(cfg: SystemConfig, init: InitialConditions) -> Tuple[float, float, float, float]:
    """(E_e, Ė_e, E_g, Ė_g) at t = 0 from the complex envelopes.

    E(0) = Re Ẽ(0) and Ė(0) = Re(−iω Ẽ(0)).
    """
    e0, g0 = init.e0, init.g0
    return (
        e0.real,
        (-1j * cfg.omega_e * e0).real,
        g0.real,
        (-1j * cfg.omega_g * g0).real,
    )
