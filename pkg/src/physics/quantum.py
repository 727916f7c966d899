"""Truncated two-mode Fock space realization of the generalized three-body Hamiltonian.

H = ω_e n_e + ω_g n_g
    + χ_g a_e† a_g† E_p + χ_e a_e a_g E_p*        (pair creation / annihilation)
    + χ_g a_e† a_g  E_p + χ_e a_e a_g† E_p*       (exchange)

with ħ = 1 and a fixed c-number pump. Evolution runs in the interaction
picture of the free part, where the four interaction terms carry the phases
e^{∓iΔ_s t} and e^{∓iΔt}.
"""

import logging
import math
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from ..errors import StepTooLargeError, TruncationBreachError
from ..schemas import QuantumState, QuantumTrajectory, TruncatedOperator

logger = logging.getLogger(__name__)

TRUNCATION_LIMIT = 1e-3
STEP_SAFETY = 0.01

INTERACTION_TERMS = ("sum_up", "sum_down", "diff_up", "diff_down")


def annihilation(n_max: int) -> np.ndarray:
    """Single-mode a with a|n⟩ = √n |n−1⟩ on {0..n_max}."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def mode_operators(n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """(a_e, a_g) on the product basis, index n_e·(n_max+1) + n_g."""
    a = annihilation(n_max)
    eye = np.eye(n_max + 1, dtype=complex)
    return np.kron(a, eye), np.kron(eye, a)


def build_hamiltonian(
    chi_e: complex,
    chi_g: complex,
    pump_amp: complex,
    omega_e: float,
    omega_g: float,
    n_max: int,
    nu: Optional[float] = None,
) -> TruncatedOperator:
    """Generalized Hamiltonian; `nu` defaults to the difference frequency ω_e − ω_g."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    a_e, a_g = mode_operators(n_max)
    ad_e = a_e.conj().T
    ad_g = a_g.conj().T
    ep = complex(pump_amp)
    terms: Dict[str, np.ndarray] = {
        "free": omega_e * ad_e @ a_e + omega_g * ad_g @ a_g,
        "sum_up": chi_g * ep * ad_e @ ad_g,
        "sum_down": chi_e * ep.conjugate() * a_e @ a_g,
        "diff_up": chi_g * ep * ad_e @ a_g,
        "diff_down": chi_e * ep.conjugate() * a_e @ ad_g,
    }
    matrix = sum(terms.values())
    return TruncatedOperator(
        n_max=n_max,
        matrix=matrix,
        terms=terms,
        omega_e=omega_e,
        omega_g=omega_g,
        nu=omega_e - omega_g if nu is None else nu,
    )


def build_standard_hamiltonian(
    chi2: float,
    pump_amp: complex,
    omega_e: float,
    omega_g: float,
    n_max: int,
    nu: Optional[float] = None,
) -> TruncatedOperator:
    """The Hermitian case χ_e = χ_g = χ⁽²⁾."""
    return build_hamiltonian(chi2, chi2, pump_amp, omega_e, omega_g, n_max, nu)


def hermiticity_defect(op: TruncatedOperator) -> float:
    """‖H − H†‖_F / max(‖H‖_F, ε)."""
    scale = max(float(np.linalg.norm(op.matrix)), np.finfo(float).eps)
    return float(np.linalg.norm(op.matrix - op.matrix.conj().T)) / scale


def coherent_state(alpha_e: complex, alpha_g: complex, n_max: int) -> QuantumState:
    """Product of truncated coherent states, renormalized to unit norm."""
    n = np.arange(n_max + 1)

    def single(alpha: complex) -> np.ndarray:
        if alpha == 0:
            amplitudes = np.zeros(n_max + 1, dtype=complex)
            amplitudes[0] = 1.0
            return amplitudes
        log_mag = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        return np.exp(log_mag - 0.5 * abs(alpha) ** 2) * np.exp(1j * n * np.angle(alpha))

    vector = np.kron(single(complex(alpha_e)), single(complex(alpha_g)))
    return QuantumState(n_max=n_max, coefficients=vector / np.linalg.norm(vector))


def fock_state(n_e: int, n_g: int, n_max: int) -> QuantumState:
    vector = np.zeros((n_max + 1) ** 2, dtype=complex)
    vector[n_e * (n_max + 1) + n_g] = 1.0
    return QuantumState(n_max=n_max, coefficients=vector)


def _detunings(op: TruncatedOperator) -> Tuple[float, float]:
    nu = op.nu if op.nu is not None else op.omega_e - op.omega_g
    return nu - (op.omega_e - op.omega_g), nu - (op.omega_e + op.omega_g)


def _phase_rates(op: TruncatedOperator) -> np.ndarray:
    """Angular rates r_k with each interaction term carrying e^{i r_k t}."""
    delta, delta_s = _detunings(op)
    return np.array([-delta_s, delta_s, -delta, delta])


def _stacked_terms(op: TruncatedOperator) -> np.ndarray:
    return np.stack([op.terms[name] for name in INTERACTION_TERMS])


def interaction_hamiltonian(op: TruncatedOperator, t: float) -> np.ndarray:
    phases = np.exp(1j * _phase_rates(op) * t)
    return np.tensordot(phases, _stacked_terms(op), axes=1)


def max_time_step(op: TruncatedOperator) -> float:
    """0.01 / max(‖H_I‖, |Δ|, |Δ_s|) with ‖H_I‖ bounded by the sum of term norms."""
    norm = sum(float(np.linalg.norm(op.terms[name], 2)) for name in INTERACTION_TERMS)
    delta, delta_s = _detunings(op)
    fastest = max(norm, abs(delta), abs(delta_s))
    return math.inf if fastest == 0.0 else STEP_SAFETY / fastest


def gain_time(chi_e: complex, chi_g: complex, pump_amp: complex) -> float:
    """1 / (√|χ_eχ_g|·|E_p|), one e-folding of the resonant field amplitude.

    Returns inf when the couplings or the pump vanish.
    """
    rate = math.sqrt(abs(complex(chi_e) * complex(chi_g))) * abs(complex(pump_amp))
    return math.inf if rate == 0.0 else 1.0 / rate


def cutoff_population(state: np.ndarray, n_max: int) -> float:
    """Fraction of ⟨ψ|ψ⟩ with either mode in the n_max shell."""
    grid = np.abs(state.reshape(n_max + 1, n_max + 1)) ** 2
    total = grid.sum()
    if total == 0.0:
        return 0.0
    edge = grid[n_max, :].sum() + grid[:, n_max].sum() - grid[n_max, n_max]
    return float(edge / total)


def _step_plan(op: TruncatedOperator, t: float, dt: Optional[float]) -> Tuple[int, float]:
    limit = max_time_step(op)
    step = dt if dt is not None else min(limit, t / 10.0)
    if step > limit * (1.0 + 1e-12):
        raise StepTooLargeError(f"dt={step:.3e} exceeds 0.01/|H|={limit:.3e}")
    n_steps = max(1, math.ceil(t / step - 1e-9))
    return n_steps, t / n_steps


def _rk4_states(psi0: np.ndarray, op: TruncatedOperator, n_steps: int, h: float) -> Iterator[Tuple[float, np.ndarray]]:
    """Yield (t, ψ) after every RK4 step of dψ/dt = −i H_I(t) ψ."""
    stacked = _stacked_terms(op)
    rates = _phase_rates(op)

    def rhs(time: float, psi: np.ndarray) -> np.ndarray:
        return -1j * (np.exp(1j * rates * time) @ (stacked @ psi))

    psi = psi0.copy()
    for i in range(n_steps):
        time = i * h
        k1 = rhs(time, psi)
        k2 = rhs(time + 0.5 * h, psi + 0.5 * h * k1)
        k3 = rhs(time + 0.5 * h, psi + 0.5 * h * k2)
        k4 = rhs(time + h, psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        yield (i + 1) * h, psi


def evolve(
    state: QuantumState,
    op: TruncatedOperator,
    t: float,
    dt: Optional[float] = None,
    sample_stride: int = 1,
) -> QuantumTrajectory:
    """RK4 propagation of |ψ⟩ in the interaction picture without renormalization.

    Expectations are reported normalized by ⟨ψ|ψ⟩; `energy_raw` keeps the
    unnormalized ⟨ψ|H|ψ⟩ with H = H₀ + H_I(t).
    """
    if state.n_max != op.n_max:
        raise ValueError("state and operator truncations differ")
    n_steps, h = _step_plan(op, t, dt)
    logger.info("Quantum evolution: dim=%d, %d steps of %.3e", op.dimension, n_steps, h)

    free = op.terms["free"]
    a_e, a_g = mode_operators(op.n_max)
    n_e_op = a_e.conj().T @ a_e
    n_g_op = a_g.conj().T @ a_g
    samples = []

    def record(time: float, psi: np.ndarray) -> None:
        breach = cutoff_population(psi, op.n_max)
        if breach > TRUNCATION_LIMIT:
            raise TruncationBreachError(
                f"cutoff shell holds {breach:.2e} of the norm at t={time:.4g} (n_max={op.n_max})"
            )
        norm_sq = float(np.vdot(psi, psi).real)
        energy_raw = np.vdot(psi, (free + interaction_hamiltonian(op, time)) @ psi)
        samples.append(
            (
                time,
                np.vdot(psi, a_e @ psi) / norm_sq,
                np.vdot(psi, a_g @ psi) / norm_sq,
                energy_raw / norm_sq,
                energy_raw,
                math.sqrt(norm_sq),
                np.vdot(psi, n_e_op @ psi).real / norm_sq,
                np.vdot(psi, n_g_op @ psi).real / norm_sq,
            )
        )

    psi = state.coefficients
    record(0.0, psi)
    for step, (time, psi) in enumerate(_rk4_states(state.coefficients, op, n_steps, h), start=1):
        if step % sample_stride == 0 or step == n_steps:
            record(time, psi)

    columns = list(zip(*samples))
    return QuantumTrajectory(
        times=np.asarray(columns[0], dtype=float),
        a_e=np.asarray(columns[1], dtype=complex),
        a_g=np.asarray(columns[2], dtype=complex),
        energy=np.asarray(columns[3], dtype=complex),
        energy_raw=np.asarray(columns[4], dtype=complex),
        norm=np.asarray(columns[5], dtype=float),
        n_e=np.asarray(columns[6], dtype=float),
        n_g=np.asarray(columns[7], dtype=float),
        final_state=QuantumState(n_max=op.n_max, coefficients=psi),
    )


def _five_point_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Central fourth-order derivative on the interior points [2:-2]."""
    return (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * h)


def heisenberg_residual(
    op: TruncatedOperator,
    state: QuantumState,
    t: float,
    dt: Optional[float] = None,
) -> float:
    """Max relative mismatch between d⟨a⟩/dt along the evolution and the Ehrenfest right-hand side.

    With H_h = (H + H†)/2 and H_a = (H − H†)/2i, normalized expectations obey
    d⟨A⟩/dt = −i⟨[A, H_h]⟩ + ⟨{A, H_a}⟩ − 2⟨A⟩⟨H_a⟩.
    Checked for both a_e and a_g.
    """
    n_steps, h = _step_plan(op, t, dt)
    if n_steps < 4:
        raise ValueError("need at least five samples for the residual stencil")
    states = [(0.0, state.coefficients.copy())] + list(_rk4_states(state.coefficients, op, n_steps, h))
    a_e, a_g = mode_operators(op.n_max)

    worst_numerator = 0.0
    worst_scale = 0.0
    for operator in (a_e, a_g):
        observed = np.array([np.vdot(psi, operator @ psi) / np.vdot(psi, psi).real for _, psi in states])
        lhs = _five_point_derivative(observed, h)
        rhs = np.empty(lhs.shape, dtype=complex)
        for j, (time, psi) in enumerate(states[2:-2]):
            hamiltonian = interaction_hamiltonian(op, time)
            herm = 0.5 * (hamiltonian + hamiltonian.conj().T)
            anti = (hamiltonian - hamiltonian.conj().T) / 2j
            norm_sq = np.vdot(psi, psi).real

            def expect(matrix: np.ndarray) -> complex:
                return np.vdot(psi, matrix @ psi) / norm_sq

            commutator = operator @ herm - herm @ operator
            anticommutator = operator @ anti + anti @ operator
            rhs[j] = -1j * expect(commutator) + expect(anticommutator) - 2.0 * expect(operator) * expect(anti)
        worst_numerator = max(worst_numerator, float(np.max(np.abs(lhs - rhs))))
        worst_scale = max(worst_scale, float(np.max(np.abs(rhs))))

    logger.debug("Heisenberg residual numerator=%.3e scale=%.3e", worst_numerator, worst_scale)
    if worst_numerator == 0.0:
        return 0.0
    return worst_numerator / max(worst_scale, np.finfo(float).tiny)


def truncation_convergence(
    chi_e: complex,
    chi_g: complex,
    pump_amp: complex,
    omega_e: float,
    omega_g: float,
    n_max: int,
    alpha_e: complex,
    alpha_g: complex,
    t: float,
    nu: Optional[float] = None,
) -> float:
    """Relative change of ⟨a_e⟩, ⟨a_g⟩ when n_max is doubled, on a shared step."""
    coarse = build_hamiltonian(chi_e, chi_g, pump_amp, omega_e, omega_g, n_max, nu)
    fine = build_hamiltonian(chi_e, chi_g, pump_amp, omega_e, omega_g, 2 * n_max, nu)
    step = min(max_time_step(fine), t / 10.0)
    low = evolve(coherent_state(alpha_e, alpha_g, n_max), coarse, t, dt=step)
    high = evolve(coherent_state(alpha_e, alpha_g, 2 * n_max), fine, t, dt=step)
    change = max(np.max(np.abs(low.a_e - high.a_e)), np.max(np.abs(low.a_g - high.a_g)))
    scale = max(np.max(np.abs(high.a_e)), np.max(np.abs(high.a_g)), np.finfo(float).tiny)
    return float(change / scale)
