"""Closed-form gain rates, thresholds, envelope solutions and energy flows.

Everything here is a pure function of the value types in ``src.schemas`` and
serves as the oracle for the numerical simulators.
"""

import cmath
import logging
import math
from typing import Tuple, Union

import numpy as np

from ..errors import InvalidScenarioError, ZeroCouplingError
from ..schemas import (
    Branch,
    ClosedFormSolution,
    ComplexAmplitude,
    EnergyScenario,
    GainReport,
    InitialConditions,
    PumpConfig,
    Regime,
    SystemConfig,
    ThresholdCriterion,
)
from .model import coupling_scale, derived_detunings, symmetry_relation

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

DEGENERATE_GAIN_RTOL = 1e-12

_THRESHOLD_FACTOR = {
    ThresholdCriterion.SUFFICIENT: 4.0,
    ThresholdCriterion.EXACT: 2.0,
}

# Sign of χ_eχ_g that each branch needs for amplification.
_REQUIRED_SIGN = {Branch.DPA: -1, Branch.OPA: 1}


def principal_root(value: complex) -> complex:
    """Square root with Re ≥ 0, and Im ≥ 0 when the real part vanishes."""
    root = cmath.sqrt(complex(value))
    if root.real < 0.0 or (root.real == 0.0 and root.imag < 0.0):
        root = -root
    return root


def branch_detuning(cfg: SystemConfig, pump: PumpConfig, branch: Branch) -> float:
    detunings = derived_detunings(cfg, pump)
    return detunings.delta_s if branch is Branch.OPA else detunings.delta


def gain_parameters(cfg: SystemConfig, pump: PumpConfig, branch: Branch) -> Tuple[complex, complex]:
    """(α_s, β_s) for OPA or (α, β) for DPA."""
    ep = pump.complex_amplitude
    alpha = 1j * cfg.chi_g * ep / (4.0 * cfg.omega_e)
    if branch is Branch.OPA:
        beta = 1j * cfg.chi_e * ep / (4.0 * cfg.omega_g)
    else:
        beta = 1j * cfg.chi_e * ep.conjugate() / (4.0 * cfg.omega_g)
    return alpha, beta


def gain_rate_squared(cfg: SystemConfig, pump: PumpConfig, branch: Branch) -> float:
    """Real radicand of the gain rate.

    4α_sβ_s* and 4αβ are real for real couplings, so the radicand is built
    directly as a float instead of from the complex gain parameters.
    """
    detuning = branch_detuning(cfg, pump, branch)
    coupling = cfg.chi_e * cfg.chi_g * pump.amplitude_a0**2 / (4.0 * cfg.omega_e * cfg.omega_g)
    if branch is Branch.OPA:
        return -(detuning**2) + coupling
    return -(detuning**2) - coupling


def gain_rate(cfg: SystemConfig, pump: PumpConfig, branch: Branch) -> complex:
    """Ω_s (OPA) or Ω (DPA) on the principal branch."""
    return principal_root(complex(gain_rate_squared(cfg, pump, branch), 0.0))


def closed_form(cfg: SystemConfig, pump: PumpConfig, branch: Branch) -> ClosedFormSolution:
    alpha, beta = gain_parameters(cfg, pump, branch)
    return ClosedFormSolution(
        branch=branch,
        gain_rate=ComplexAmplitude.of(gain_rate(cfg, pump, branch)),
        alpha=ComplexAmplitude.of(alpha),
        beta=ComplexAmplitude.of(beta),
        detuning=branch_detuning(cfg, pump, branch),
    )


def pump_threshold(
    cfg: SystemConfig,
    pump_nu: float,
    branch: Branch,
    criterion: ThresholdCriterion = ThresholdCriterion.SUFFICIENT,
) -> float:
    """Pump amplitude needed for real gain at pump frequency `pump_nu` (rad/s).

    SUFFICIENT gives 4|detuning|√(ω_eω_g/|χ_eχ_g|); EXACT gives half of that,
    the amplitude at which the radicand changes sign.
    """
    if cfg.chi_e * cfg.chi_g == 0.0:
        raise ZeroCouplingError("pump threshold undefined: chi_e * chi_g = 0")
    if branch is Branch.OPA:
        detuning = pump_nu - cfg.sigma_omega
    else:
        detuning = pump_nu - cfg.delta_omega
    return _THRESHOLD_FACTOR[criterion] * abs(detuning) * coupling_scale(cfg)


def dominant_branch(cfg: SystemConfig, pump: PumpConfig) -> Branch:
    """Branch whose detuning is smaller in magnitude; ties go to DPA."""
    detunings = derived_detunings(cfg, pump)
    return Branch.DPA if abs(detunings.delta) <= abs(detunings.delta_s) else Branch.OPA


def classify_regime(cfg: SystemConfig, pump: PumpConfig) -> GainReport:
    """Classify the dominant branch as Amplify, Exchange, BelowThreshold or OffResonant."""
    detunings = derived_detunings(cfg, pump)
    branch = dominant_branch(cfg, pump)
    omega = gain_rate(cfg, pump, branch)
    sign = symmetry_relation(cfg)
    required = _REQUIRED_SIGN[branch]

    threshold = None
    margin = 0.0
    if sign != 0:
        threshold = pump_threshold(cfg, pump.nu, branch, ThresholdCriterion.EXACT)
        # infinite at exact resonance, A0 = 0 included
        margin = pump.amplitude_a0 / threshold if threshold > 0.0 else math.inf

    if omega.real > 0.0:
        regime = Regime.AMPLIFY
    elif sign == required:
        regime = Regime.BELOW_THRESHOLD
    elif sign == -required and threshold is not None and pump.amplitude_a0 > threshold:
        regime = Regime.EXCHANGE
    else:
        regime = Regime.OFF_RESONANT

    return GainReport(
        branch=branch,
        gain_rate=ComplexAmplitude.of(omega),
        regime=regime,
        threshold_margin=margin,
        symmetry=sign,
        detunings=detunings,
        threshold=threshold,
    )


def _half_sinh_ratio(omega: complex, t: np.ndarray, scale: float) -> Tuple[np.ndarray, np.ndarray]:
    """cosh(Ωt/2) and 2 sinh(Ωt/2)/Ω, with the Ω → 0 limit taken analytically."""
    if abs(omega) <= DEGENERATE_GAIN_RTOL * scale:
        logger.debug("Degenerate gain |Ω|=%.3e, using series limit", abs(omega))
        return np.ones_like(t, dtype=complex), t.astype(complex)
    half = 0.5 * omega * t
    return np.cosh(half), 2.0 * np.sinh(half) / omega


def propagate_envelopes(
    branch: Branch,
    alpha: complex,
    beta: complex,
    detuning: float,
    e0: complex,
    g0: complex,
    t: ArrayLike,
) -> Tuple[np.ndarray, np.ndarray]:
    """Exact slowly varying envelopes (ℰ_e, ℰ_g) for arbitrary gain parameters.

    DPA:  ℰ_e' = α ℰ_g e^{−iΔt},   ℰ_g' = β ℰ_e e^{iΔt}
    OPA:  ℰ_e' = α ℰ_g* e^{−iΔt},  ℰ_g' = β ℰ_e* e^{−iΔt}

    The OPA system is the DPA one for (ℰ_e, ℰ_g*) with β replaced by β*.
    """
    times = np.asarray(t, dtype=float)
    if branch is Branch.OPA:
        beta_eff = complex(beta).conjugate()
        v0 = complex(g0).conjugate()
    else:
        beta_eff = complex(beta)
        v0 = complex(g0)

    omega = principal_root(-(detuning**2) + 4.0 * alpha * beta_eff)
    scale = max(abs(detuning), abs(alpha), abs(beta_eff), 1e-300)
    ch, s = _half_sinh_ratio(omega, times, scale)

    u = e0 * (ch + 0.5j * detuning * s) + alpha * v0 * s
    v = v0 * (ch - 0.5j * detuning * s) + beta_eff * e0 * s
    half_phase = np.exp(-0.5j * detuning * times)
    env_e = u * half_phase
    if branch is Branch.OPA:
        env_g = np.conjugate(v) * half_phase
    else:
        env_g = v / half_phase
    return env_e, env_g


def _solve(
    cfg: SystemConfig, pump: PumpConfig, init: InitialConditions, t: ArrayLike, branch: Branch
) -> Tuple[np.ndarray, np.ndarray]:
    times = np.asarray(t, dtype=float)
    if np.any(times < 0.0):
        raise ValueError("closed-form solutions are defined for t >= 0")
    alpha, beta = gain_parameters(cfg, pump, branch)
    detuning = branch_detuning(cfg, pump, branch)
    env_e, env_g = propagate_envelopes(branch, alpha, beta, detuning, init.e0, init.g0, times)
    return env_e * np.exp(-1j * cfg.omega_e * times), env_g * np.exp(-1j * cfg.omega_g * times)


def solve_opa(
    cfg: SystemConfig, pump: PumpConfig, init: InitialConditions, t: ArrayLike
) -> Tuple[np.ndarray, np.ndarray]:
    """Complex fields Ẽ_e(t), Ẽ_g(t) for a sum-frequency pump, carriers included."""
    return _solve(cfg, pump, init, t, Branch.OPA)


def solve_dpa(
    cfg: SystemConfig, pump: PumpConfig, init: InitialConditions, t: ArrayLike
) -> Tuple[np.ndarray, np.ndarray]:
    """Complex fields Ẽ_e(t), Ẽ_g(t) for a difference-frequency pump, carriers included."""
    return _solve(cfg, pump, init, t, Branch.DPA)


def solve_branch(
    cfg: SystemConfig, pump: PumpConfig, init: InitialConditions, t: ArrayLike, branch: Branch
) -> Tuple[np.ndarray, np.ndarray]:
    return _solve(cfg, pump, init, t, branch)


_SCENARIOS = {
    # scenario: (branch, required symmetry sign, amplifying)
    EnergyScenario.EXCHANGE_DIFF_PUMP: (Branch.DPA, 1, False),
    EnergyScenario.AMPLIFY_DIFF_PUMP: (Branch.DPA, -1, True),
    EnergyScenario.AMPLIFY_SUM_PUMP: (Branch.OPA, 1, True),
    EnergyScenario.EXCHANGE_SUM_PUMP: (Branch.OPA, -1, False),
}


def scenario_branch(scenario: EnergyScenario) -> Branch:
    return _SCENARIOS[scenario][0]


def _check_scenario(cfg: SystemConfig, pump: PumpConfig, scenario: EnergyScenario) -> Tuple[Branch, bool]:
    branch, sign, amplifying = _SCENARIOS[scenario]
    if symmetry_relation(cfg) != sign:
        raise InvalidScenarioError(
            f"{scenario.value} needs sign(chi_e*chi_g) = {sign:+d}, got {symmetry_relation(cfg):+d}"
        )
    detuning = branch_detuning(cfg, pump, branch)
    if abs(detuning) > 1e-9 * pump.nu:
        raise InvalidScenarioError(f"{scenario.value} needs a resonant pump, detuning is {detuning:.6g} rad/s")
    if pump.phi != 0.0:
        raise InvalidScenarioError(f"{scenario.value} closed form assumes phi = 0")
    return branch, amplifying


def energy_flow_closed_form(
    cfg: SystemConfig,
    pump: PumpConfig,
    q_e0: float,
    t: ArrayLike,
    scenario: EnergyScenario,
) -> Tuple[np.ndarray, np.ndarray]:
    """Slowly varying approximation of (dW_e/dt, dW_g/dt) for Ẽ_e(0) = Q, Ẽ_g(0) = 0.

    With g the real or imaginary part of the gain rate and f = sinh(gt) when
    amplifying or sin(gt) when exchanging:

        dW_e/dt = −χ_eχ_g (A0²Q²/4g)(ω_e/ω_g) sin(ω_e t) sin(ω_g t) cos(νt) f
        dW_g/dt =  χ_e²   (A0²Q²/4g)          cos(ω_e t) cos(ω_g t) cos(νt) f
    """
    branch, amplifying = _check_scenario(cfg, pump, scenario)
    times = np.asarray(t, dtype=float)
    omega = gain_rate(cfg, pump, branch)
    rate = omega.real if amplifying else omega.imag
    if rate == 0.0:
        zeros = np.zeros_like(times)
        return zeros, zeros.copy()

    growth = np.sinh(rate * times) if amplifying else np.sin(rate * times)
    prefactor = pump.amplitude_a0**2 * q_e0**2 / (4.0 * rate)
    carrier = np.cos(pump.nu * times)
    flow_e = (
        -cfg.chi_e * cfg.chi_g * prefactor * (cfg.omega_e / cfg.omega_g)
        * np.sin(cfg.omega_e * times) * np.sin(cfg.omega_g * times) * carrier * growth
    )
    flow_g = (
        cfg.chi_e**2 * prefactor
        * np.cos(cfg.omega_e * times) * np.cos(cfg.omega_g * times) * carrier * growth
    )
    return flow_e, flow_g


def coarse_energy_closed_form(
    cfg: SystemConfig,
    pump: PumpConfig,
    q_e0: float,
    t: ArrayLike,
    scenario: EnergyScenario,
) -> Tuple[np.ndarray, np.ndarray]:
    """Carrier-averaged energy gained by each mode since t = 0.

    Averaging the products of carriers gives ±1/4: the e-mode factor
    sin·sin·cos(νt) averages to +1/4 under a difference pump and to −1/4
    under a sum pump; the g-mode factor averages to +1/4 for both.
    """
    branch, amplifying = _check_scenario(cfg, pump, scenario)
    times = np.asarray(t, dtype=float)
    omega = gain_rate(cfg, pump, branch)
    rate = omega.real if amplifying else omega.imag
    if rate == 0.0:
        zeros = np.zeros_like(times)
        return zeros, zeros.copy()

    # ∫ sinh = (cosh − 1)/g, ∫ sin = (1 − cos)/g
    integral = (np.cosh(rate * times) - 1.0) if amplifying else (1.0 - np.cos(rate * times))
    prefactor = pump.amplitude_a0**2 * q_e0**2 / (16.0 * rate**2)
    e_sign = 1.0 if branch is Branch.DPA else -1.0
    work_e = -e_sign * cfg.chi_e * cfg.chi_g * prefactor * (cfg.omega_e / cfg.omega_g) * integral
    work_g = cfg.chi_e**2 * prefactor * integral
    return work_e, work_g
