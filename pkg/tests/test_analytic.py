"""Tests for the closed-form gain, threshold, envelope and energy-flow layer."""

import math

import numpy as np
import pytest

from src.errors import InvalidScenarioError, ZeroCouplingError
from src.physics.analytic import (
    classify_regime,
    closed_form,
    coarse_energy_closed_form,
    dominant_branch,
    energy_flow_closed_form,
    gain_parameters,
    gain_rate,
    principal_root,
    propagate_envelopes,
    pump_threshold,
    solve_dpa,
    solve_opa,
)
from src.physics.model import baseline_system, derived_detunings, difference_pump, sum_pump
from src.schemas import (
    TWO_PI,
    Branch,
    EnergyScenario,
    InitialConditions,
    PumpConfig,
    Regime,
    SystemConfig,
    ThresholdCriterion,
)


def _random_config(rng):
    omega_g = TWO_PI * rng.uniform(100.0, 2000.0)
    omega_e = omega_g + TWO_PI * rng.uniform(10.0, 1000.0)
    chi_e = rng.choice([-1.0, 1.0]) * 10 ** rng.uniform(4.0, 7.0)
    chi_g = rng.choice([-1.0, 1.0]) * 10 ** rng.uniform(4.0, 7.0)
    cfg = SystemConfig(omega_e=omega_e, omega_g=omega_g, chi_e=chi_e, chi_g=chi_g)
    pump = PumpConfig(
        amplitude_a0=rng.uniform(0.0, 3.0),
        nu=TWO_PI * rng.uniform(10.0, 5000.0),
        phi=rng.uniform(-math.pi, math.pi),
    )
    return cfg, pump


def test_gain_rate_identity_random_configs():
    """Test Ω² + Δ² − 4αβ = 0 and Ω_s² + Δ_s² − 4α_sβ_s* = 0 over random configurations."""
    rng = np.random.default_rng(20240501)
    for _ in range(10_000):
        cfg, pump = _random_config(rng)
        detunings = derived_detunings(cfg, pump)

        alpha, beta = gain_parameters(cfg, pump, Branch.DPA)
        omega = gain_rate(cfg, pump, Branch.DPA)
        scale = max(detunings.delta**2, abs(4.0 * alpha * beta), 1e-300)
        assert abs(omega**2 + detunings.delta**2 - 4.0 * alpha * beta) <= 1e-12 * scale

        alpha_s, beta_s = gain_parameters(cfg, pump, Branch.OPA)
        omega_s = gain_rate(cfg, pump, Branch.OPA)
        product = alpha_s * beta_s.conjugate()
        scale = max(detunings.delta_s**2, abs(4.0 * product), 1e-300)
        assert abs(omega_s**2 + detunings.delta_s**2 - 4.0 * product) <= 1e-12 * scale


def test_principal_root_branch():
    assert principal_root(-4.0) == pytest.approx(2j)
    assert principal_root(4.0) == pytest.approx(2.0)
    assert principal_root(0.0) == 0.0


def test_resonant_gain_rates(dpa_system, dpa_pump, opa_system, opa_pump):
    """Test that resonant pumps give real gain for the matching symmetry sign."""
    omega = gain_rate(dpa_system, dpa_pump, Branch.DPA)
    omega_s = gain_rate(opa_system, opa_pump, Branch.OPA)

    assert omega.real == pytest.approx(TWO_PI * 10.0, rel=1e-3)
    assert omega.imag == 0.0
    assert omega_s.real == pytest.approx(TWO_PI * 10.0, rel=1e-3)


def test_closed_form_parameters(dpa_system, dpa_pump):
    solution = closed_form(dpa_system, dpa_pump, Branch.DPA)

    assert solution.a == pytest.approx(gain_rate(dpa_system, dpa_pump, Branch.DPA).real)
    assert solution.b == 0.0
    assert solution.alpha.value == pytest.approx(1j * dpa_system.chi_g / (4.0 * dpa_system.omega_e))


def test_pump_threshold_baseline_example(dpa_system):
    """Test the 4|Δ|√(ω_eω_g/|χ_eχ_g|) threshold at Δ = 2π·5 rad/s."""
    nu = dpa_system.delta_omega + TWO_PI * 5.0

    sufficient = pump_threshold(dpa_system, nu, Branch.DPA)
    exact = pump_threshold(dpa_system, nu, Branch.DPA, ThresholdCriterion.EXACT)

    assert sufficient == pytest.approx(1.0, rel=0.01)
    assert exact == pytest.approx(0.5 * sufficient)


def test_pump_threshold_zero_coupling():
    cfg = SystemConfig(omega_e=2.0, omega_g=1.0, chi_e=1.0, chi_g=0.0)

    with pytest.raises(ZeroCouplingError):
        pump_threshold(cfg, 1.0, Branch.DPA)


@pytest.mark.parametrize("offset_hz", [-20.0, -7.0, -2.0, 0.5, 3.0, 12.0])
@pytest.mark.parametrize("a0", [0.1, 0.4, 0.9, 1.6, 3.0])
def test_dpa_amplifies_iff_above_exact_threshold(dpa_system, offset_hz, a0):
    """Test Re(Ω) > 0 exactly when A0 exceeds the exact threshold."""
    pump = difference_pump(dpa_system, amplitude_a0=a0, offset_hz=offset_hz)
    threshold = pump_threshold(dpa_system, pump.nu, Branch.DPA, ThresholdCriterion.EXACT)

    assert (gain_rate(dpa_system, pump, Branch.DPA).real > 0.0) == (a0 > threshold)


def test_exchange_rate_is_imaginary(opa_system):
    """Test that a resonant difference pump with χ_eχ_g > 0 only exchanges energy."""
    omega = gain_rate(opa_system, difference_pump(opa_system), Branch.DPA)

    assert omega.real == 0.0
    assert omega.imag == pytest.approx(TWO_PI * 10.0, rel=1e-3)


def test_dominant_branch_tie_goes_to_dpa(dpa_system):
    cfg = SystemConfig(omega_e=3.0, omega_g=1.0, chi_e=1.0, chi_g=-1.0)

    assert dominant_branch(cfg, PumpConfig(amplitude_a0=1.0, nu=3.0)) is Branch.DPA
    assert dominant_branch(dpa_system, sum_pump(dpa_system)) is Branch.OPA


def test_classify_regimes(dpa_system, opa_system):
    """Test the four regime labels."""
    assert classify_regime(dpa_system, difference_pump(dpa_system)).regime is Regime.AMPLIFY
    assert classify_regime(opa_system, difference_pump(opa_system)).regime is Regime.EXCHANGE
    assert classify_regime(dpa_system, difference_pump(dpa_system, offset_hz=20.0)).regime is Regime.BELOW_THRESHOLD
    assert classify_regime(opa_system, difference_pump(opa_system, offset_hz=20.0)).regime is Regime.OFF_RESONANT
    assert classify_regime(opa_system, sum_pump(opa_system)).regime is Regime.AMPLIFY
    assert classify_regime(dpa_system, sum_pump(dpa_system)).regime is Regime.EXCHANGE


def test_classify_resonant_margin_is_infinite(dpa_system, dpa_pump):
    report = classify_regime(dpa_system, dpa_pump)

    assert report.threshold == 0.0
    assert report.threshold_margin == math.inf
    assert report.symmetry == -1


def test_classify_unpumped_resonance_margin_is_infinite():
    cfg = SystemConfig(omega_e=3.0, omega_g=1.0, chi_e=1.0, chi_g=-1.0)

    report = classify_regime(cfg, PumpConfig(amplitude_a0=0.0, nu=2.0))

    assert report.detunings.delta == 0.0
    assert report.threshold == 0.0
    assert report.threshold_margin == math.inf
    assert report.regime is Regime.BELOW_THRESHOLD


def test_classify_zero_coupling():
    cfg = SystemConfig(omega_e=TWO_PI * 1460.0, omega_g=TWO_PI * 1240.0, chi_e=0.0, chi_g=1.0)

    report = classify_regime(cfg, difference_pump(cfg))

    assert report.regime is Regime.OFF_RESONANT
    assert report.threshold is None
    assert report.threshold_margin == 0.0


@pytest.mark.parametrize("branch", [Branch.DPA, Branch.OPA])
def test_propagate_at_zero_time(branch):
    env_e, env_g = propagate_envelopes(branch, 0.3 + 0.1j, -0.2j, 1.5, 0.7 - 0.2j, 0.1 + 0.4j, np.array([0.0]))

    assert env_e[0] == pytest.approx(0.7 - 0.2j)
    assert env_g[0] == pytest.approx(0.1 + 0.4j)


@pytest.mark.parametrize(
    "branch, alpha, beta, detuning",
    [
        (Branch.DPA, 0.3 + 0.1j, -0.4j, 0.8),
        (Branch.DPA, 0.5, 0.5, 1.0),  # degenerate Ω = 0
        (Branch.OPA, 0.2j, 0.35j, -0.6),
        (Branch.OPA, 0.3 - 0.2j, 0.1 + 0.5j, 2.5),
    ],
)
def test_propagate_solves_envelope_equations(branch, alpha, beta, detuning):
    """Test the closed form against its defining ODE by central differences."""
    e0, g0 = 0.9 + 0.2j, -0.3 + 0.5j
    h = 1e-6
    for t in (0.4, 1.3, 3.0):
        (em, ec, ep), (gm, gc, gp) = propagate_envelopes(
            branch, alpha, beta, detuning, e0, g0, np.array([t - h, t, t + h])
        )
        de = (ep - em) / (2.0 * h)
        dg = (gp - gm) / (2.0 * h)
        if branch is Branch.DPA:
            expected_e = alpha * gc * np.exp(-1j * detuning * t)
            expected_g = beta * ec * np.exp(1j * detuning * t)
        else:
            expected_e = alpha * np.conj(gc) * np.exp(-1j * detuning * t)
            expected_g = beta * np.conj(ec) * np.exp(-1j * detuning * t)
        scale = max(abs(expected_e), abs(expected_g), 1.0)
        assert abs(de - expected_e) <= 1e-6 * scale
        assert abs(dg - expected_g) <= 1e-6 * scale


def test_propagate_swap_symmetry():
    """Test that swapping the modes maps (α, β, Δ) to (β, α, −Δ)."""
    t = np.linspace(0.0, 4.0, 9)
    alpha, beta, detuning = 0.3 + 0.2j, -0.1 + 0.4j, 0.7
    e0, g0 = 1.0 + 0.1j, 0.2 - 0.3j

    env_e, env_g = propagate_envelopes(Branch.DPA, alpha, beta, detuning, e0, g0, t)
    swap_g, swap_e = propagate_envelopes(Branch.DPA, beta, alpha, -detuning, g0, e0, t)

    np.testing.assert_allclose(swap_e, env_e, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(swap_g, env_g, rtol=1e-12, atol=1e-12)


def test_solve_dpa_resonant_envelope(dpa_system, dpa_pump, unit_init):
    """Test |ℰ_e| = cosh(Ωt/2) for Ẽ_e(0) = 1, Ẽ_g(0) = 0 at resonance."""
    t = np.linspace(0.0, 0.2, 11)
    omega = gain_rate(dpa_system, dpa_pump, Branch.DPA).real

    env_e, env_g = solve_dpa(dpa_system, dpa_pump, unit_init, t)

    np.testing.assert_allclose(np.abs(env_e), np.cosh(0.5 * omega * t), rtol=1e-10)
    assert env_g[0] == 0.0


def test_solve_opa_resonant_envelope(opa_system, opa_pump, unit_init):
    t = np.linspace(0.0, 0.2, 11)
    omega = gain_rate(opa_system, opa_pump, Branch.OPA).real

    env_e, _ = solve_opa(opa_system, opa_pump, unit_init, t)

    np.testing.assert_allclose(np.abs(env_e), np.cosh(0.5 * omega * t), rtol=1e-10)


def test_solve_rejects_negative_time(dpa_system, dpa_pump, unit_init):
    with pytest.raises(ValueError):
        solve_dpa(dpa_system, dpa_pump, unit_init, np.array([-1.0]))


@pytest.mark.parametrize(
    "scenario, symmetry, pump_factory",
    [
        (EnergyScenario.EXCHANGE_DIFF_PUMP, 1, difference_pump),
        (EnergyScenario.AMPLIFY_DIFF_PUMP, -1, difference_pump),
        (EnergyScenario.AMPLIFY_SUM_PUMP, 1, sum_pump),
        (EnergyScenario.EXCHANGE_SUM_PUMP, -1, sum_pump),
    ],
)
def test_coarse_energy_signs(scenario, symmetry, pump_factory):
    """Test that amplification feeds both modes and exchange moves energy from e to g."""
    cfg = baseline_system(symmetry)
    t = np.linspace(0.0, 0.05, 6)[1:]

    work_e, work_g = coarse_energy_closed_form(cfg, pump_factory(cfg), 1.0, t, scenario)

    assert np.all(work_g > 0.0)
    if "Amplify" in scenario.value:
        assert np.all(work_e > 0.0)
    else:
        assert np.all(work_e < 0.0)


def test_coarse_energy_matches_mode_energy(dpa_system, dpa_pump):
    """Test that the averaged work on mode e equals ¼ω_e²(cosh(at) − 1)."""
    t = np.linspace(0.0, 0.1, 5)
    a = gain_rate(dpa_system, dpa_pump, Branch.DPA).real

    work_e, _ = coarse_energy_closed_form(dpa_system, dpa_pump, 1.0, t, EnergyScenario.AMPLIFY_DIFF_PUMP)

    np.testing.assert_allclose(work_e, 0.25 * dpa_system.omega_e**2 * (np.cosh(a * t) - 1.0), rtol=1e-9)


def test_energy_flow_closed_form_starts_at_zero(dpa_system, dpa_pump):
    flow_e, flow_g = energy_flow_closed_form(
        dpa_system, dpa_pump, 1.0, np.array([0.0, 0.01]), EnergyScenario.AMPLIFY_DIFF_PUMP
    )

    assert flow_e[0] == 0.0
    assert flow_g[0] == 0.0


def test_energy_flow_rejects_wrong_symmetry(opa_system):
    with pytest.raises(InvalidScenarioError):
        energy_flow_closed_form(
            opa_system, difference_pump(opa_system), 1.0, np.array([0.0]), EnergyScenario.AMPLIFY_DIFF_PUMP
        )


def test_energy_flow_rejects_detuned_pump(dpa_system):
    with pytest.raises(InvalidScenarioError):
        energy_flow_closed_form(
            dpa_system,
            difference_pump(dpa_system, offset_hz=1.0),
            1.0,
            np.array([0.0]),
            EnergyScenario.AMPLIFY_DIFF_PUMP,
        )


def test_energy_flow_rejects_pump_phase(dpa_system):
    pump = PumpConfig(amplitude_a0=1.0, nu=dpa_system.delta_omega, phi=0.3)

    with pytest.raises(InvalidScenarioError):
        coarse_energy_closed_form(dpa_system, pump, 1.0, np.array([0.0]), EnergyScenario.AMPLIFY_DIFF_PUMP)


def test_initial_conditions_propagate(dpa_system, dpa_pump):
    """Test that an initially empty pair stays empty."""
    env_e, env_g = solve_dpa(dpa_system, dpa_pump, InitialConditions.of(0.0, 0.0), np.linspace(0.0, 0.1, 5))

    assert np.all(env_e == 0.0)
    assert np.all(env_g == 0.0)
