"""Feedback-loop waveguide cavity: antenna-position couplings and DPA windows."""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..schemas import (
    Branch,
    CavityConfig,
    DpaWindows,
    PumpConfig,
    Simulator,
    SweepAxis,
    SweepMetric,
    SweepParameter,
    SweepResult,
    SweepSpec,
    SystemConfig,
    WindowInterval,
)
from .analytic import principal_root

logger = logging.getLogger(__name__)


def effective_coupling(cav: CavityConfig) -> Tuple[float, float]:
    """χ_e = χ cos(k_e x_r), χ_g = χ cos(k_g x_r)."""
    return cav.chi * math.cos(cav.k_e * cav.x_r), cav.chi * math.cos(cav.k_g * cav.x_r)


def cavity_system(cav: CavityConfig) -> SystemConfig:
    """Standard system configuration seen by the target modes at this antenna position."""
    chi_e, chi_g = effective_coupling(cav)
    return SystemConfig(omega_e=cav.omega_e, omega_g=cav.omega_g, chi_e=chi_e, chi_g=chi_g)


def resonant_pump(cav: CavityConfig, branch: Branch) -> PumpConfig:
    nu = cav.omega_e + cav.omega_g if branch is Branch.OPA else cav.omega_e - cav.omega_g
    return PumpConfig(amplitude_a0=cav.amplitude_a0, nu=nu, phi=cav.phi)


def cavity_gain(cav: CavityConfig, branch: Branch) -> complex:
    """Ω₀ = √(±χ² cos(k_e x_r) cos(k_g x_r) A0² / 4ω_eω_g), + for a sum pump."""
    sign = 1.0 if branch is Branch.OPA else -1.0
    radicand = (
        sign
        * cav.chi**2
        * math.cos(cav.k_e * cav.x_r)
        * math.cos(cav.k_g * cav.x_r)
        * cav.amplitude_a0**2
        / (4.0 * cav.omega_e * cav.omega_g)
    )
    return principal_root(complex(radicand, 0.0))


def cavity_fields(
    cav: CavityConfig, branch: Branch, q_e0: float, t: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Resonant real fields for Ẽ_e(0) = Q, Ẽ_g(0) = 0.

    E_e = Q cos(ω_e t) cosh(Ω₀t/2),  E_g = (χ_e A0 Q / 2ω_g Ω₀) sin(ω_g t) sinh(Ω₀t/2)
    """
    times = np.asarray(t, dtype=float)
    omega0 = cavity_gain(cav, branch)
    chi_e, _ = effective_coupling(cav)
    e_field = q_e0 * np.cos(cav.omega_e * times) * np.cosh(0.5 * omega0 * times)
    if omega0 == 0:
        sinh_ratio = 0.5 * times
    else:
        sinh_ratio = np.sinh(0.5 * omega0 * times) / omega0
    g_field = chi_e * cav.amplitude_a0 * q_e0 / (2.0 * cav.omega_g) * np.sin(cav.omega_g * times) * sinh_ratio
    return np.real(e_field), np.real(g_field)


def _bracketed_windows(cav: CavityConfig, m_range: Sequence[int]) -> List[WindowInterval]:
    return [
        WindowInterval(
            start=(2 * m + 1) * cav.wavelength_e / 4.0,
            end=(2 * m + 1) * cav.wavelength_g / 4.0,
            m=m,
        )
        for m in m_range
    ]


def _cosine_nodes(k: float, x_max: float) -> List[float]:
    nodes = []
    j = 0
    while True:
        node = (j + 0.5) * math.pi / k
        if node > x_max:
            return nodes
        nodes.append(node)
        j += 1


def exact_windows(cav: CavityConfig, x_max: float) -> List[WindowInterval]:
    """Intervals in [0, x_max] where cos(k_e x)·cos(k_g x) < 0, from the merged node sets."""
    edges = sorted(set([0.0] + _cosine_nodes(cav.k_e, x_max) + _cosine_nodes(cav.k_g, x_max) + [x_max]))
    intervals: List[WindowInterval] = []
    for start, end in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (start + end)
        if math.cos(cav.k_e * mid) * math.cos(cav.k_g * mid) >= 0.0:
            continue
        if intervals and math.isclose(intervals[-1].end, start, rel_tol=0.0, abs_tol=1e-15 * x_max):
            intervals[-1] = WindowInterval(start=intervals[-1].start, end=end)
        else:
            intervals.append(WindowInterval(start=start, end=end))
    # The last interval may be clipped at x_max.
    return intervals


def dpa_windows(cav: CavityConfig, m_range: Sequence[int], x_max: Optional[float] = None) -> DpaWindows:
    """Quarter-wavelength bracket windows alongside the exact sign-derived windows.

    The brackets ((2m+1)λ_e/4, (2m+1)λ_g/4) only enumerate the negative-sign
    regions for small m; `bracketed_is_subset` records whether every bracket
    still lies inside one exact window.
    """
    if any(m < 0 for m in m_range):
        raise ValueError("window orders must be non-negative")
    bracketed = _bracketed_windows(cav, m_range)
    if x_max is None:
        x_max = (2 * max(m_range, default=0) + 3) * cav.wavelength_g / 4.0
    exact = exact_windows(cav, x_max)
    subset = all(
        any(w.start <= b.start and b.end <= w.end for w in exact) for b in bracketed
    )
    if not subset:
        logger.info("Quarter-wavelength brackets no longer match the sign windows for m <= %d", max(m_range))
    return DpaWindows(bracketed=bracketed, exact=exact, bracketed_is_subset=subset)


def in_negative_symmetry(cav: CavityConfig, x_r: float) -> bool:
    chi_e, chi_g = effective_coupling(cav.model_copy(update={"x_r": x_r}))
    return chi_e * chi_g < 0.0


def sweep_antenna(
    cav: CavityConfig,
    x_min: float,
    x_max: float,
    count: int,
    branch: Branch,
    metric: SweepMetric,
    simulator: Simulator = Simulator.ENVELOPE,
    horizon_s: Optional[float] = None,
    jobs: int = 1,
) -> SweepResult:
    """Scan the receiver position with a resonant pump on `branch`."""
    from ..sweep.engine import run_sweep

    pumped = cav.model_copy(update={"nu": resonant_pump(cav, branch).nu})
    spec = SweepSpec(
        axis1=SweepAxis(parameter=SweepParameter.X_R, min=x_min, max=x_max, count=count),
        system=cavity_system(pumped),
        pump=pumped.pump,
        metric=metric,
        horizon_s=horizon_s,
        simulator=simulator,
        cavity=pumped,
    )
    logger.info("Antenna sweep over %d positions (%s pump)", count, branch.value)
    return run_sweep(spec, jobs=jobs)
