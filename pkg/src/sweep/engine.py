"""Parameter-sweep engine with ordered, deterministic parallel evaluation."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from ..errors import ConfigError, NotGrowingError, ParametricError
from ..schemas import (
    TWO_PI,
    CavityConfig,
    EnvelopeForm,
    PumpConfig,
    Simulator,
    SweepAxis,
    SweepCell,
    SweepMetric,
    SweepParameter,
    SweepResult,
    SweepSpec,
    SystemConfig,
)
from ..physics.analytic import classify_regime
from ..physics.cavity import cavity_system
from ..physics.integrator import default_settings, integrate_envelope, integrate_full
from ..physics.model import resonant_gain_magnitude
from ..physics.spectral import fit_envelope_rate

logger = logging.getLogger(__name__)

HORIZON_GAIN_PERIODS = 5.0
TAIL_FRACTION = 0.1
GROWTH_FACTOR = 2.0
ENVELOPE_SAMPLES = 4000
FULL_SAMPLE_STRIDE = 10


def default_horizon(spec: SweepSpec) -> float:
    """Five gain periods of the baseline's resonant gain rate."""
    if spec.horizon_s is not None:
        return spec.horizon_s
    system = spec.system
    if spec.cavity is not None:
        # Reference gain at an antenna node-free point, |χ_e| = |χ_g| = χ.
        system = SystemConfig(
            omega_e=spec.cavity.omega_e,
            omega_g=spec.cavity.omega_g,
            chi_e=spec.cavity.chi,
            chi_g=spec.cavity.chi,
        )
    rate = resonant_gain_magnitude(system, spec.pump.amplitude_a0)
    if rate == 0.0:
        raise ConfigError("horizon_s is required when the baseline has no gain (zero pump or coupling)")
    return HORIZON_GAIN_PERIODS * TWO_PI / rate


def cell_configuration(
    spec: SweepSpec, value1: float, value2: Optional[float]
) -> Tuple[SystemConfig, PumpConfig]:
    """System and pump for one grid point."""
    system_updates = {}
    pump_updates = {}
    x_r = None
    for axis, value in ((spec.axis1, value1), (spec.axis2, value2)):
        if axis is None:
            continue
        if axis.parameter is SweepParameter.NU_HZ:
            pump_updates["nu"] = TWO_PI * value
        elif axis.parameter is SweepParameter.CHI_E:
            system_updates["chi_e"] = value
        elif axis.parameter is SweepParameter.CHI_G:
            system_updates["chi_g"] = value
        else:
            x_r = value

    if x_r is not None:
        cavity: CavityConfig = spec.cavity.model_copy(update={"x_r": x_r})
        system = cavity_system(cavity)
    else:
        system = spec.system
    if system_updates:
        system = SystemConfig(**{**system.model_dump(), **system_updates})
    pump = spec.pump
    if pump_updates:
        pump = PumpConfig(**{**pump.model_dump(), **pump_updates})
    return system, pump


def _weighted_norm(system: SystemConfig, env_e: np.ndarray, env_g: np.ndarray) -> np.ndarray:
    weighted = np.sqrt(
        system.omega_e * abs(system.chi_e) * np.abs(env_e) ** 2
        + system.omega_g * abs(system.chi_g) * np.abs(env_g) ** 2
    )
    if weighted[0] == 0.0:
        return np.sqrt(np.abs(env_e) ** 2 + np.abs(env_g) ** 2)
    return weighted


def _simulate(
    spec: SweepSpec, system: SystemConfig, pump: PumpConfig, horizon: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample times and complex envelope magnitudes (Ẽ_e, Ẽ_g) from the chosen simulator."""
    if spec.simulator is Simulator.FULL:
        ts = integrate_full(
            system, pump, spec.init, default_settings(horizon, sample_stride=FULL_SAMPLE_STRIDE)
        )
        # |E + iĖ/ω| recovers the envelope magnitude of a near-harmonic field.
        env_e = ts.samples_e + 1j * ts.velocity_e / system.omega_e
        env_g = ts.samples_g + 1j * ts.velocity_g / system.omega_g
        return ts.times, env_e, env_g
    series = integrate_envelope(
        system,
        pump,
        spec.init,
        default_settings(horizon, dt=horizon / ENVELOPE_SAMPLES),
        EnvelopeForm.DETUNED,
    )
    return series.times, series.envelope_e, series.envelope_g


def evaluate_cell(spec: SweepSpec, index: int, value1: float, value2: Optional[float], horizon: float) -> SweepCell:
    """Evaluate one grid point; failures become a cell-level error string."""
    try:
        system, pump = cell_configuration(spec, value1, value2)
        report = classify_regime(system, pump)
        if spec.metric is SweepMetric.ANALYTIC_RE_OMEGA:
            return SweepCell(
                index=index,
                axis1_value=value1,
                axis2_value=value2,
                metric=report.gain_rate.re,
                report=report,
            )

        times, env_e, env_g = _simulate(spec, system, pump, horizon)
        norm = _weighted_norm(system, env_e, env_g)
        amplified = bool(norm[-1] > GROWTH_FACTOR * norm[0])
        if spec.metric is SweepMetric.FINAL_PEAK_MAGNITUDE:
            tail = max(1, int(math.ceil(TAIL_FRACTION * times.size)))
            metric = float(np.max(np.abs(env_e[-tail:])))
        else:
            try:
                metric, _ = fit_envelope_rate(times, env_e)
            except NotGrowingError:
                metric = 0.0
        return SweepCell(
            index=index,
            axis1_value=value1,
            axis2_value=value2,
            metric=metric,
            report=report.model_copy(update={"fitted_rate": metric}) if spec.metric is SweepMetric.FITTED_GROWTH_RATE else report,
            simulated_amplify=amplified,
        )
    except (ParametricError, ValueError) as e:
        logger.debug("Cell %d failed: %s", index, e)
        return SweepCell(
            index=index,
            axis1_value=value1,
            axis2_value=value2,
            error=f"{type(e).__name__}: {e}",
        )


def _evaluate_packed(payload: Tuple[SweepSpec, int, float, Optional[float], float]) -> SweepCell:
    return evaluate_cell(*payload)


def grid_points(spec: SweepSpec) -> List[Tuple[int, float, Optional[float]]]:
    """Row-major (index, axis1 value, axis2 value) triples."""
    values1 = spec.axis1.values().tolist()
    values2: List[Optional[float]] = spec.axis2.values().tolist() if spec.axis2 else [None]
    points = []
    for i, v1 in enumerate(values1):
        for j, v2 in enumerate(values2):
            points.append((i * len(values2) + j, v1, v2))
    return points


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every grid cell; output order and values do not depend on `jobs`."""
    if jobs < 1:
        raise ConfigError("jobs must be at least 1")
    horizon = default_horizon(spec) if spec.metric is not SweepMetric.ANALYTIC_RE_OMEGA else 0.0
    points = grid_points(spec)
    payloads = [(spec, index, v1, v2, horizon) for index, v1, v2 in points]
    logger.info(
        "Sweep %s x %s: %d cells, metric=%s, jobs=%d",
        spec.axis1.parameter.value,
        spec.axis2.parameter.value if spec.axis2 else "-",
        len(payloads),
        spec.metric.value,
        jobs,
    )

    if jobs == 1 or len(payloads) == 1:
        cells = [_evaluate_packed(p) for p in payloads]
    else:
        chunksize = max(1, len(payloads) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_evaluate_packed, payloads, chunksize=chunksize))

    failed = sum(1 for c in cells if c.error is not None)
    if failed:
        logger.warning("%d of %d sweep cells failed", failed, len(cells))
    return SweepResult(spec=spec, cells=cells)


def regime_map(spec: SweepSpec) -> SweepResult:
    """Analytic-only fast path: symmetry signs and regime labels for every cell."""
    analytic = spec.model_copy(update={"metric": SweepMetric.ANALYTIC_RE_OMEGA})
    return run_sweep(analytic, jobs=1)


def axis(parameter: SweepParameter, low: float, high: float, count: int) -> SweepAxis:
    return SweepAxis(parameter=parameter, min=low, max=high, count=count)
