"""Numerical simulators for the coupled-wave system.

``integrate_full`` steps the second-order equations

    Ë_e = −ω_e² E_e + χ_g E_g E_p
    Ë_g = −ω_g² E_g + χ_e E_e E_p

with classical fixed-step RK4. ``integrate_envelope`` solves the first-order
envelope equations with an adaptive embedded pair.
"""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp
from scipy.ndimage import uniform_filter1d

from ..config import settings as app_settings
from ..errors import NonFiniteError, NumericError, StepTooLargeError
from ..schemas import (
    TWO_PI,
    Branch,
    EnergyFlow,
    EnvelopeForm,
    EnvelopeSeries,
    InitialConditions,
    IntegratorSettings,
    PumpConfig,
    SystemConfig,
    TimeSeries,
)
from .model import derived_detunings, phase_space_initial, pump_field

logger = logging.getLogger(__name__)

STEPS_PER_CYCLE = 200


def max_step(cfg: SystemConfig, pump: PumpConfig) -> float:
    """Largest admissible full-mode step: 1/(200·f_max), f_max = max(ω_e, ν+ω_e)/2π."""
    f_max = max(cfg.omega_e, pump.nu + cfg.omega_e) / TWO_PI
    return 1.0 / (STEPS_PER_CYCLE * f_max)


def _step_grid(t_end: float, dt: float) -> Tuple[int, float]:
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    return n_steps, t_end / n_steps


def _warn_if_uncoupled(cfg: SystemConfig, pump: PumpConfig) -> None:
    if pump.amplitude_a0 > 0.0 and cfg.chi_e == 0.0 and cfg.chi_g == 0.0:
        logger.warning("Pumped run with both couplings zero; fields evolve freely")


def integrate_full(
    cfg: SystemConfig,
    pump: PumpConfig,
    init: InitialConditions,
    settings: IntegratorSettings,
) -> TimeSeries:
    """RK4 integration of the full equations; returns fields and their derivatives."""
    limit = max_step(cfg, pump)
    dt = settings.dt if settings.dt is not None else limit
    if dt > limit * (1.0 + 1e-12):
        raise StepTooLargeError(f"dt={dt:.3e} s exceeds 1/(200 f_max)={limit:.3e} s")
    n_steps, h = _step_grid(settings.t_end, dt)
    stride = settings.sample_stride
    _warn_if_uncoupled(cfg, pump)
    logger.info("Full integration: %d steps of %.3e s", n_steps, h)

    # Pump on the half-step grid: index 2i is t_i, 2i+1 is t_i + h/2.
    pump_half = pump_field(pump, 0.5 * h * np.arange(2 * n_steps + 1)).tolist()

    we2 = cfg.omega_e**2
    wg2 = cfg.omega_g**2
    ce = cfg.chi_e
    cg = cfg.chi_g
    h2 = 0.5 * h
    h6 = h / 6.0

    xe, ve, xg, vg = phase_space_initial(cfg, init)
    out_xe = [xe]
    out_ve = [ve]
    out_xg = [xg]
    out_vg = [vg]

    for i in range(n_steps):
        p0 = pump_half[2 * i]
        p1 = pump_half[2 * i + 1]
        p2 = pump_half[2 * i + 2]

        a1e = -we2 * xe + cg * xg * p0
        a1g = -wg2 * xg + ce * xe * p0

        xe2 = xe + h2 * ve
        xg2 = xg + h2 * vg
        ve2 = ve + h2 * a1e
        vg2 = vg + h2 * a1g
        a2e = -we2 * xe2 + cg * xg2 * p1
        a2g = -wg2 * xg2 + ce * xe2 * p1

        xe3 = xe + h2 * ve2
        xg3 = xg + h2 * vg2
        ve3 = ve + h2 * a2e
        vg3 = vg + h2 * a2g
        a3e = -we2 * xe3 + cg * xg3 * p1
        a3g = -wg2 * xg3 + ce * xe3 * p1

        xe4 = xe + h * ve3
        xg4 = xg + h * vg3
        ve4 = ve + h * a3e
        vg4 = vg + h * a3g
        a4e = -we2 * xe4 + cg * xg4 * p2
        a4g = -wg2 * xg4 + ce * xe4 * p2

        xe += h6 * (ve + 2.0 * ve2 + 2.0 * ve3 + ve4)
        xg += h6 * (vg + 2.0 * vg2 + 2.0 * vg3 + vg4)
        ve += h6 * (a1e + 2.0 * a2e + 2.0 * a3e + a4e)
        vg += h6 * (a1g + 2.0 * a2g + 2.0 * a3g + a4g)

        if (i + 1) % stride == 0:
            if not math.isfinite(xe + xg + ve + vg):
                raise NonFiniteError(f"non-finite field at t={(i + 1) * h:.6g} s")
            out_xe.append(xe)
            out_ve.append(ve)
            out_xg.append(xg)
            out_vg.append(vg)

    logger.info("Full integration finished: %d samples", len(out_xe))
    return TimeSeries(
        dt=h * stride,
        t0=0.0,
        samples_e=np.asarray(out_xe),
        samples_g=np.asarray(out_xg),
        velocity_e=np.asarray(out_ve),
        velocity_g=np.asarray(out_vg),
    )


def envelope_rhs(
    cfg: SystemConfig, pump: PumpConfig, form: EnvelopeForm
) -> Callable[[float, np.ndarray], np.ndarray]:
    """Right-hand side for y = [ℰ_e, ℰ_g]."""
    detunings = derived_detunings(cfg, pump)
    delta = detunings.delta
    delta_s = detunings.delta_s
    ep = pump.complex_amplitude
    ce = 1j * cfg.chi_g / (4.0 * cfg.omega_e)
    cgc = 1j * cfg.chi_e / (4.0 * cfg.omega_g)
    ep_conj = ep.conjugate()

    if form is EnvelopeForm.DPA:

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            diff = np.exp(-1j * delta * t)
            return np.array([ce * ep * y[1] * diff, cgc * ep_conj * y[0] / diff])

    elif form is EnvelopeForm.OPA:

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            total = np.exp(-1j * delta_s * t)
            return np.array(
                [ce * ep * np.conj(y[1]) * total, cgc * ep * np.conj(y[0]) * total]
            )

    else:

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            diff = np.exp(-1j * delta * t)
            total = np.exp(-1j * delta_s * t)
            return np.array(
                [
                    ce * ep * (y[1] * diff + np.conj(y[1]) * total),
                    cgc * (y[0] * ep_conj / diff + np.conj(y[0]) * ep * total),
                ]
            )

    return rhs


def integrate_envelope(
    cfg: SystemConfig,
    pump: PumpConfig,
    init: InitialConditions,
    settings: IntegratorSettings,
    form: EnvelopeForm = EnvelopeForm.DETUNED,
) -> EnvelopeSeries:
    """Adaptive DOP853 integration of the envelope equations.

    `settings.dt` is the output sample spacing (defaults to the full-mode step
    limit so the carrier stays resolved); the returned series carries the
    carrier, Ẽ = ℰ e^{−iωt}.
    """
    spacing = settings.dt if settings.dt is not None else max_step(cfg, pump)
    n_steps, h = _step_grid(settings.t_end, spacing)
    sample_dt = h * settings.sample_stride
    n_samples = n_steps // settings.sample_stride + 1
    t_eval = sample_dt * np.arange(n_samples)
    _warn_if_uncoupled(cfg, pump)
    logger.info("Envelope integration (%s form): %d samples", form.value, n_samples)

    solution = solve_ivp(
        envelope_rhs(cfg, pump, form),
        (0.0, float(t_eval[-1])),
        np.array([init.e0, init.g0], dtype=complex),
        method="DOP853",
        t_eval=t_eval,
        rtol=settings.rtol,
        atol=settings.atol,
    )
    if not solution.success:
        raise NumericError(f"envelope integration failed: {solution.message}")
    if not np.all(np.isfinite(solution.y)):
        raise NonFiniteError("envelope integration produced non-finite values")

    times = solution.t
    return EnvelopeSeries(
        dt=sample_dt,
        t0=0.0,
        envelope_e=solution.y[0] * np.exp(-1j * cfg.omega_e * times),
        envelope_g=solution.y[1] * np.exp(-1j * cfg.omega_g * times),
        form=form,
    )


def default_settings(t_end: float, dt: Optional[float] = None, sample_stride: int = 1) -> IntegratorSettings:
    """Integrator settings with tolerances from the application settings."""
    return IntegratorSettings(
        t_end=t_end,
        dt=dt,
        rtol=app_settings.envelope_rtol,
        atol=app_settings.envelope_atol,
        sample_stride=sample_stride,
    )


def energy_flow_numeric(ts: TimeSeries, cfg: SystemConfig, pump: PumpConfig) -> EnergyFlow:
    """dW_e/dt = Ė_e·χ_g E_g E_p and dW_g/dt = Ė_g·χ_e E_e E_p per sample, with cumulative W."""
    if not ts.has_velocity:
        raise ValueError("energy flow needs a time series with stored derivatives")
    ep = pump_field(pump, ts.times)
    flow_e = ts.velocity_e * cfg.chi_g * ts.samples_g * ep
    flow_g = ts.velocity_g * cfg.chi_e * ts.samples_e * ep
    return EnergyFlow(
        dt=ts.dt,
        t0=ts.t0,
        flow_e=flow_e,
        flow_g=flow_g,
        work_e=cumulative_trapezoid(flow_e, dx=ts.dt, initial=0.0),
        work_g=cumulative_trapezoid(flow_g, dx=ts.dt, initial=0.0),
    )


def oscillator_energy(ts: TimeSeries, cfg: SystemConfig) -> Tuple[np.ndarray, np.ndarray]:
    """½(Ė² + ω²E²) per mode; its derivative is exactly the driving-term power."""
    if not ts.has_velocity:
        raise ValueError("oscillator energy needs stored derivatives")
    w_e = 0.5 * (ts.velocity_e**2 + cfg.omega_e**2 * ts.samples_e**2)
    w_g = 0.5 * (ts.velocity_g**2 + cfg.omega_g**2 * ts.samples_g**2)
    return w_e, w_g


def coarse_grain(values: np.ndarray, dt: float, window_s: float) -> np.ndarray:
    """Moving average over `window_s` seconds."""
    size = max(1, int(round(window_s / dt)))
    return uniform_filter1d(np.asarray(values, dtype=float), size=size, mode="nearest")


def manley_rowe_invariant(series: EnvelopeSeries, cfg: SystemConfig, branch: Branch) -> np.ndarray:
    """(ω_e/χ_g)|Ẽ_e|² ∓ (ω_g/χ_e)|Ẽ_g|²: minus for a sum pump, plus for a difference pump."""
    if cfg.chi_e == 0.0 or cfg.chi_g == 0.0:
        raise ValueError("invariant needs both couplings nonzero")
    sign = -1.0 if branch is Branch.OPA else 1.0
    return (cfg.omega_e / cfg.chi_g) * np.abs(series.envelope_e) ** 2 + sign * (
        cfg.omega_g / cfg.chi_e
    ) * np.abs(series.envelope_g) ** 2


def relative_drift(values: np.ndarray) -> float:
    """max |v − v0| / |v0|."""
    values = np.asarray(values)
    reference = abs(values[0])
    if reference == 0.0:
        return float(np.max(np.abs(values - values[0])))
    return float(np.max(np.abs(values - values[0])) / reference)
