"""Tests for the parameter-sweep engine."""

import numpy as np
import pytest

from src.errors import ConfigError, NumericError
from src.physics.model import BASELINE_CHI, baseline_system, difference_pump, sum_pump
from src.schemas import (
    TWO_PI,
    PumpConfig,
    Regime,
    SweepAxis,
    SweepMetric,
    SweepParameter,
    SweepSpec,
)
from src.sweep.engine import (
    axis,
    cell_configuration,
    default_horizon,
    grid_points,
    regime_map,
    run_sweep,
)


def _chi_plane(count, metric=SweepMetric.ANALYTIC_RE_OMEGA, horizon_s=None, pump_at=difference_pump):
    cfg = baseline_system(-1)
    span = 2.0 * BASELINE_CHI
    return SweepSpec(
        axis1=axis(SweepParameter.CHI_E, -span, span, count),
        axis2=axis(SweepParameter.CHI_G, -span, span, count),
        system=cfg,
        pump=pump_at(cfg),
        metric=metric,
        horizon_s=horizon_s,
    )


def test_grid_points_are_row_major(dpa_system, dpa_pump):
    spec = SweepSpec(
        axis1=axis(SweepParameter.NU_HZ, 200.0, 240.0, 3),
        axis2=axis(SweepParameter.CHI_G, -2.0, -1.0, 2),
        system=dpa_system,
        pump=dpa_pump,
    )

    points = grid_points(spec)

    assert [p[0] for p in points] == list(range(6))
    assert points[1] == (1, 200.0, -1.0)
    assert points[2] == (2, 220.0, -2.0)


def test_cell_configuration_overrides(dpa_system, dpa_pump):
    spec = SweepSpec(
        axis1=axis(SweepParameter.NU_HZ, 200.0, 240.0, 3),
        axis2=axis(SweepParameter.CHI_E, 1.0, 2.0, 2),
        system=dpa_system,
        pump=dpa_pump,
    )

    system, pump = cell_configuration(spec, 230.0, 5.0)

    assert pump.nu == pytest.approx(TWO_PI * 230.0)
    assert system.chi_e == 5.0
    assert system.chi_g == dpa_system.chi_g


def test_default_horizon_is_five_gain_periods(dpa_system, dpa_pump):
    spec = SweepSpec(axis1=axis(SweepParameter.NU_HZ, 200.0, 240.0, 3), system=dpa_system, pump=dpa_pump)

    assert default_horizon(spec) == pytest.approx(0.5, rel=1e-3)


def test_default_horizon_needs_gain(dpa_system):
    spec = SweepSpec(
        axis1=axis(SweepParameter.NU_HZ, 200.0, 240.0, 3),
        system=dpa_system,
        pump=PumpConfig(amplitude_a0=0.0, nu=dpa_system.delta_omega),
    )

    with pytest.raises(ConfigError):
        default_horizon(spec)


def test_nu_sweep_peaks_at_difference_frequency(dpa_system, dpa_pump):
    """Test that the simulated final magnitude peaks at ν/2π = 220 Hz."""
    spec = SweepSpec(
        axis1=axis(SweepParameter.NU_HZ, 160.0, 280.0, 7),
        system=dpa_system,
        pump=dpa_pump,
        metric=SweepMetric.FINAL_PEAK_MAGNITUDE,
        horizon_s=0.2,
    )

    result = run_sweep(spec)
    grid = result.metric_grid()[:, 0]

    assert result.errors == []
    assert result.cells[int(np.argmax(grid))].axis1_value == pytest.approx(220.0)
    assert result.cells[3].simulated_amplify is True
    assert result.cells[0].simulated_amplify is False


def test_nu_sweep_peaks_at_sum_frequency(opa_system, opa_pump):
    """Test that with χ_eχ_g > 0 the simulated final magnitude peaks at ν/2π = 2700 Hz."""
    spec = SweepSpec(
        axis1=axis(SweepParameter.NU_HZ, 2600.0, 2800.0, 5),
        system=opa_system,
        pump=opa_pump,
        metric=SweepMetric.FINAL_PEAK_MAGNITUDE,
        horizon_s=0.2,
    )

    result = run_sweep(spec)
    grid = result.metric_grid()[:, 0]

    assert result.errors == []
    assert result.cells[int(np.argmax(grid))].axis1_value == pytest.approx(2700.0)
    assert result.cells[2].simulated_amplify is True
    assert result.cells[0].simulated_amplify is False


@pytest.mark.parametrize(
    "pump_at, amplifying_sign, corner",
    [(difference_pump, -1, Regime.EXCHANGE), (sum_pump, 1, Regime.AMPLIFY)],
)
def test_analytic_chi_plane_quadrants(pump_at, amplifying_sign, corner):
    """Test that a pump amplifies exactly in the quadrants whose sign of χ_eχ_g its branch needs."""
    result = regime_map(_chi_plane(21, pump_at=pump_at))
    signs = result.symmetry_grid()
    labels = result.label_grid()

    assert result.spec.shape == (21, 21)
    for (i, j), sign in np.ndenumerate(signs):
        assert (labels[i, j] == Regime.AMPLIFY.value) == (sign == amplifying_sign)
    assert labels[10, 10] == Regime.OFF_RESONANT.value
    assert labels[0, 0] == corner.value
    assert np.all(result.metric_grid()[signs != amplifying_sign] == 0.0)
    assert np.all(result.metric_grid()[signs == amplifying_sign] > 0.0)


@pytest.mark.slow
def test_simulated_amplification_lies_in_analytic_region():
    """Test that every cell the envelope simulation amplifies is labelled Amplify."""
    result = run_sweep(_chi_plane(5, SweepMetric.FINAL_PEAK_MAGNITUDE, horizon_s=0.2))

    assert result.errors == []
    for cell in result.cells:
        if cell.simulated_amplify:
            assert cell.report.regime is Regime.AMPLIFY
    assert sum(1 for c in result.cells if c.simulated_amplify) == 8


def test_sweep_is_independent_of_jobs():
    """Test that worker count changes neither order nor values."""
    spec = _chi_plane(7)

    serial = run_sweep(spec, jobs=1)
    parallel = run_sweep(spec, jobs=8)

    assert serial == parallel


def test_sweep_rejects_zero_jobs():
    with pytest.raises(ConfigError):
        run_sweep(_chi_plane(3), jobs=0)


def test_failing_cells_are_reported_not_raised(mocker):
    mocker.patch("src.sweep.engine.classify_regime", side_effect=NumericError("boom"))

    result = run_sweep(_chi_plane(3))

    assert len(result.errors) == 9
    assert all(c.label == "error" for c in result.cells)
    assert "NumericError: boom" in result.cells[0].error
    assert np.all(np.isnan(result.metric_grid()))


def test_fitted_growth_rate_metric(dpa_system, dpa_pump):
    """Test that the fitted rate approaches Re(Ω)/2 at resonance and is zero off resonance."""
    spec = SweepSpec(
        axis1=SweepAxis(parameter=SweepParameter.NU_HZ, min=120.0, max=220.0, count=2),
        system=dpa_system,
        pump=dpa_pump,
        metric=SweepMetric.FITTED_GROWTH_RATE,
        horizon_s=0.2,
    )

    result = run_sweep(spec)
    off, on = result.cells

    assert off.metric == 0.0
    assert on.metric == pytest.approx(0.5 * on.report.gain_rate.re, rel=0.05)
    assert on.report.fitted_rate == on.metric
