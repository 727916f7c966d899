"""Figure-data presets: every CSV needed to re-plot the resonance, flow and cavity panels."""

import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..physics.analytic import (
    classify_regime,
    energy_flow_closed_form,
    gain_rate,
    scenario_branch,
    solve_branch,
)
from ..physics.cavity import dpa_windows, sweep_antenna
from ..physics.integrator import (
    coarse_grain,
    default_settings,
    energy_flow_numeric,
    integrate_full,
)
from ..physics.model import (
    BASELINE_CHI,
    BASELINE_OMEGA_E_HZ,
    BASELINE_OMEGA_G_HZ,
    baseline_system,
    difference_pump,
    sum_pump,
)
from ..physics.spectral import dominant_peak, fit_growth_rate, fft_spectrum, peak_width_hz
from ..schemas import (
    TWO_PI,
    Branch,
    CavityConfig,
    Channel,
    EnergyFlow,
    EnergyScenario,
    GainReport,
    InitialConditions,
    PumpConfig,
    SweepAxis,
    SweepMetric,
    SweepParameter,
    SweepSpec,
    SystemConfig,
    TimeSeries,
    Window,
)
from ..sweep.engine import run_sweep
from ..tools.writers import (
    write_energy_flow_csv,
    write_grid_csv,
    write_spectrum_csv,
    write_time_series_csv,
    write_windows_csv,
)

logger = logging.getLogger(__name__)

FIGURE_STRIDE = 10
NU_SWEEP_HZ = (20.0, 3000.0, 150)
CHI_PLANE_SPAN = 2.0
CHI_PLANE_COUNT = 21
ANTENNA_SPAN_LAMBDA_G = 2.0
ANTENNA_COUNT = 801
WINDOW_ORDERS = range(0, 4)


class FigureRun(BaseModel):
    """Files and findings produced by one figure preset."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    figure: int
    outputs: List[str] = Field(default_factory=list)
    findings: List[str] = Field(default_factory=list)
    reports: List[Tuple[str, GainReport]] = Field(default_factory=list)


def _relative(out_dir: Path, paths: List[Path]) -> List[str]:
    return [str(p.relative_to(out_dir)) for p in paths]


def amplification_run(symmetry: int, branch: Branch, gain_periods: float = 2.0) -> Tuple[SystemConfig, PumpConfig, TimeSeries]:
    """Resonantly pumped full simulation from Ẽ_e(0) = 1, Ẽ_g(0) = 0."""
    cfg = baseline_system(symmetry)
    pump = difference_pump(cfg) if branch is Branch.DPA else sum_pump(cfg)
    omega = gain_rate(cfg, pump, branch)
    t_end = gain_periods * TWO_PI / abs(omega)
    ts = integrate_full(cfg, pump, InitialConditions.of(1.0), default_settings(t_end, sample_stride=FIGURE_STRIDE))
    return cfg, pump, ts


def figure2(out_dir: Path, jobs: int = 1) -> FigureRun:
    """Resonant DPA and OPA runs: fields, closed forms and spectra."""
    run = FigureRun(figure=2)
    for label, symmetry, branch in (("dpa", -1, Branch.DPA), ("opa", 1, Branch.OPA)):
        cfg, pump, ts = amplification_run(symmetry, branch)
        report = classify_regime(cfg, pump)
        run.reports.append((label.upper(), report))

        closed_e, closed_g = solve_branch(cfg, pump, InitialConditions.of(1.0), ts.times, branch)
        closed = TimeSeries(dt=ts.dt, samples_e=closed_e.real, samples_g=closed_g.real)
        paths = [
            write_time_series_csv(out_dir / f"fig2_{label}_full.csv", ts),
            write_time_series_csv(out_dir / f"fig2_{label}_closed_form.csv", closed),
        ]
        for channel in (Channel.E, Channel.G):
            spectrum = fft_spectrum(ts, channel, Window.HANN)
            paths.append(write_spectrum_csv(out_dir / f"fig2_{label}_spectrum_{channel.value}.csv", spectrum))
            freq, _ = dominant_peak(spectrum)
            run.findings.append(
                f"{label.upper()} E_{channel.value}: peak at {freq:.2f} Hz, "
                f"half-maximum width {peak_width_hz(spectrum):.2f} Hz"
            )
        fitted = fit_growth_rate(ts, Channel.E, cfg.omega_e_hz)
        run.findings.append(
            f"{label.upper()} fitted envelope rate {fitted:.4g} 1/s vs Re(Omega)/2 = {report.gain_rate.re / 2:.4g} 1/s"
        )
        run.outputs += _relative(out_dir, paths)
    return run


def _nu_sweep(symmetry: int) -> SweepSpec:
    cfg = baseline_system(symmetry)
    low, high, count = NU_SWEEP_HZ
    return SweepSpec(
        axis1=SweepAxis(parameter=SweepParameter.NU_HZ, min=low, max=high, count=count),
        system=cfg,
        pump=difference_pump(cfg),
        metric=SweepMetric.FINAL_PEAK_MAGNITUDE,
    )


def _chi_plane(branch: Branch) -> SweepSpec:
    cfg = baseline_system(-1 if branch is Branch.DPA else 1)
    span = CHI_PLANE_SPAN * BASELINE_CHI
    return SweepSpec(
        axis1=SweepAxis(parameter=SweepParameter.CHI_E, min=-span, max=span, count=CHI_PLANE_COUNT),
        axis2=SweepAxis(parameter=SweepParameter.CHI_G, min=-span, max=span, count=CHI_PLANE_COUNT),
        system=cfg,
        pump=difference_pump(cfg) if branch is Branch.DPA else sum_pump(cfg),
        metric=SweepMetric.FINAL_PEAK_MAGNITUDE,
    )


def figure3(out_dir: Path, jobs: int = 1) -> FigureRun:
    """Pump-frequency resonance maps for both symmetry signs and the two coupling planes."""
    run = FigureRun(figure=3)
    for label, symmetry in (("negative", -1), ("positive", 1)):
        result = run_sweep(_nu_sweep(symmetry), jobs=jobs)
        grid = result.metric_grid()[:, 0]
        best = result.cells[int(np.nanargmax(grid))].axis1_value
        run.findings.append(f"nu sweep, symmetry {label}: maximum at {best:.1f} Hz")
        run.outputs += _relative(out_dir, write_grid_csv(out_dir / f"fig3_nu_sweep_{label}.csv", result))
    for branch in (Branch.OPA, Branch.DPA):
        result = run_sweep(_chi_plane(branch), jobs=jobs)
        amplified = sum(1 for c in result.cells if c.simulated_amplify)
        run.findings.append(f"{branch.value} coupling plane: {amplified} amplifying cells of {len(result.cells)}")
        run.outputs += _relative(out_dir, write_grid_csv(out_dir / f"fig3_chi_plane_{branch.value.lower()}.csv", result))
    return run


_SCENARIO_SIGNS = {
    EnergyScenario.EXCHANGE_DIFF_PUMP: 1,
    EnergyScenario.AMPLIFY_DIFF_PUMP: -1,
    EnergyScenario.AMPLIFY_SUM_PUMP: 1,
    EnergyScenario.EXCHANGE_SUM_PUMP: -1,
}


class ScenarioRun(BaseModel):
    """Numerical and closed-form energy flows of one scenario."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    scenario: EnergyScenario
    system: SystemConfig
    pump: PumpConfig
    series: TimeSeries
    flow: EnergyFlow
    coarse_e: np.ndarray
    coarse_g: np.ndarray
    closed_e: np.ndarray
    closed_g: np.ndarray
    window_s: float


def energy_scenario(scenario: EnergyScenario, q_e0: float = 1.0) -> ScenarioRun:
    """Full simulation over one gain period (amplifying) or the first half-period of b (exchanging)."""
    branch = scenario_branch(scenario)
    cfg = baseline_system(_SCENARIO_SIGNS[scenario])
    pump = difference_pump(cfg) if branch is Branch.DPA else sum_pump(cfg)
    omega = gain_rate(cfg, pump, branch)
    amplifying = omega.real > 0.0
    t_end = TWO_PI / omega.real if amplifying else math.pi / omega.imag
    ts = integrate_full(cfg, pump, InitialConditions.of(q_e0), default_settings(t_end))
    flow = energy_flow_numeric(ts, cfg, pump)
    window = TWO_PI / cfg.delta_omega
    closed_e, closed_g = energy_flow_closed_form(cfg, pump, q_e0, ts.times, scenario)
    return ScenarioRun(
        scenario=scenario,
        system=cfg,
        pump=pump,
        series=ts,
        flow=flow,
        coarse_e=coarse_grain(flow.flow_e, ts.dt, window),
        coarse_g=coarse_grain(flow.flow_g, ts.dt, window),
        closed_e=closed_e,
        closed_g=closed_g,
        window_s=window,
    )


def figure4(out_dir: Path, jobs: int = 1) -> FigureRun:
    """Energy flows for the four pump/symmetry scenarios."""
    run = FigureRun(figure=4)
    for scenario in EnergyScenario:
        result = energy_scenario(scenario)
        flow_path = write_energy_flow_csv(
            out_dir / f"fig4_{scenario.value}.csv", result.flow, result.coarse_e, result.coarse_g
        )
        closed = EnergyFlow(
            dt=result.flow.dt,
            flow_e=result.closed_e,
            flow_g=result.closed_g,
            work_e=np.zeros_like(result.closed_e),
            work_g=np.zeros_like(result.closed_g),
        )
        closed_path = write_energy_flow_csv(out_dir / f"fig4_{scenario.value}_closed_form.csv", closed)
        correlation = float(np.corrcoef(result.coarse_e, result.coarse_g)[0, 1])
        run.findings.append(f"{scenario.value}: coarse-grained flow correlation {correlation:+.3f}")
        run.outputs += _relative(out_dir, [flow_path, closed_path])
    return run


def baseline_cavity() -> CavityConfig:
    return CavityConfig.from_hz(
        BASELINE_OMEGA_E_HZ, BASELINE_OMEGA_G_HZ, chi=BASELINE_CHI, nu_hz=BASELINE_OMEGA_E_HZ - BASELINE_OMEGA_G_HZ
    )


def figure5(out_dir: Path, jobs: int = 1) -> FigureRun:
    """Antenna-position scans under sum and difference pumps, plus the window list."""
    run = FigureRun(figure=5)
    cav = baseline_cavity()
    x_max = ANTENNA_SPAN_LAMBDA_G * cav.wavelength_g
    for branch, label in ((Branch.OPA, "sum_pump"), (Branch.DPA, "diff_pump")):
        result = sweep_antenna(cav, 0.0, x_max, ANTENNA_COUNT, branch, SweepMetric.ANALYTIC_RE_OMEGA, jobs=jobs)
        amplified = sum(1 for c in result.cells if c.metric and c.metric > 0.0)
        run.findings.append(f"{label}: {amplified} of {len(result.cells)} antenna positions amplify")
        run.outputs += _relative(out_dir, write_grid_csv(out_dir / f"fig5_antenna_{label}.csv", result))
    windows = dpa_windows(cav, WINDOW_ORDERS, x_max=x_max)
    run.findings.append(f"quarter-wavelength windows inside sign windows: {windows.bracketed_is_subset}")
    run.outputs += _relative(out_dir, [write_windows_csv(out_dir / "fig5_windows.csv", windows, cav.wavelength_g)])
    return run


FIGURES: Dict[int, Callable[[Path, int], FigureRun]] = {
    2: figure2,
    3: figure3,
    4: figure4,
    5: figure5,
}


def produce_figure(number: int, out_dir: Path, jobs: int = 1) -> FigureRun:
    if number not in FIGURES:
        raise ValueError(f"no preset for figure {number}")
    logger.info("Producing figure %d data into %s", number, out_dir)
    return FIGURES[number](out_dir, jobs)
