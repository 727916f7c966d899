"""Pydantic schemas for the parametric wave lab."""

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TWO_PI = 2.0 * math.pi


class Branch(str, Enum):
    """Pump branch: sum-frequency (OPA) or difference-frequency (DPA)."""

    OPA = "OPA"
    DPA = "DPA"


class Regime(str, Enum):
    """Outcome of a gain classification."""

    AMPLIFY = "Amplify"
    EXCHANGE = "Exchange"
    BELOW_THRESHOLD = "BelowThreshold"
    OFF_RESONANT = "OffResonant"


class EnvelopeForm(str, Enum):
    """Which reduced envelope system to integrate."""

    DETUNED = "Detuned"
    OPA = "OPA"
    DPA = "DPA"


class Window(str, Enum):
    RECT = "Rect"
    HANN = "Hann"


class Channel(str, Enum):
    E = "e"
    G = "g"


class ThresholdCriterion(str, Enum):
    """SUFFICIENT is the quoted 4|Δ| bound, EXACT is where the radicand changes sign."""

    SUFFICIENT = "sufficient"
    EXACT = "exact"


class EnergyScenario(str, Enum):
    """The four pump/symmetry combinations of the energy-flow analysis."""

    EXCHANGE_DIFF_PUMP = "ExchangeDiffPump"
    AMPLIFY_DIFF_PUMP = "AmplifyDiffPump"
    AMPLIFY_SUM_PUMP = "AmplifySumPump"
    EXCHANGE_SUM_PUMP = "ExchangeSumPump"


class SweepParameter(str, Enum):
    NU_HZ = "nu_hz"
    CHI_E = "chi_e"
    CHI_G = "chi_g"
    X_R = "x_r"


class SweepMetric(str, Enum):
    FINAL_PEAK_MAGNITUDE = "FinalPeakMagnitude"
    FITTED_GROWTH_RATE = "FittedGrowthRate"
    ANALYTIC_RE_OMEGA = "AnalyticReOmega"


class Simulator(str, Enum):
    ENVELOPE = "envelope"
    FULL = "full"


# ---------------------------------------------------------------------------
# Scalar domain types
# ---------------------------------------------------------------------------


class ComplexAmplitude(BaseModel):
    """Complex scalar stored as real and imaginary parts."""

    model_config = ConfigDict(frozen=True)

    re: float = 0.0
    im: float = 0.0

    @classmethod
    def of(cls, value: complex) -> "ComplexAmplitude":
        value = complex(value)
        return cls(re=value.real, im=value.imag)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class SystemConfig(BaseModel):
    """Mode frequencies (rad/s) and nonlinear couplings of the two target fields."""

    model_config = ConfigDict(frozen=True)

    omega_e: float = Field(gt=0.0, description="Upper mode angular frequency, rad/s")
    omega_g: float = Field(gt=0.0, description="Lower mode angular frequency, rad/s")
    chi_e: float = Field(description="Coupling driving the g-equation")
    chi_g: float = Field(description="Coupling driving the e-equation")

    @field_validator("chi_e", "chi_g")
    @classmethod
    def _finite_coupling(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("coupling must be finite")
        return value

    @model_validator(mode="after")
    def _ordered_modes(self) -> "SystemConfig":
        if not self.omega_e > self.omega_g:
            raise ValueError("omega_e must exceed omega_g (positive mode splitting)")
        return self

    @classmethod
    def from_hz(
        cls, omega_e_hz: float, omega_g_hz: float, chi_e: float, chi_g: float
    ) -> "SystemConfig":
        return cls(
            omega_e=TWO_PI * omega_e_hz,
            omega_g=TWO_PI * omega_g_hz,
            chi_e=chi_e,
            chi_g=chi_g,
        )

    @property
    def omega_e_hz(self) -> float:
        return self.omega_e / TWO_PI

    @property
    def omega_g_hz(self) -> float:
        return self.omega_g / TWO_PI

    @property
    def delta_omega(self) -> float:
        """Normal-mode splitting ω_e − ω_g."""
        return self.omega_e - self.omega_g

    @property
    def sigma_omega(self) -> float:
        return self.omega_e + self.omega_g


class PumpConfig(BaseModel):
    """Classical pump E_p(t) = A0 cos(νt + φ)."""

    model_config = ConfigDict(frozen=True)

    amplitude_a0: float = Field(ge=0.0, description="Pump amplitude A0")
    nu: float = Field(gt=0.0, description="Pump angular frequency, rad/s")
    phi: float = Field(default=0.0, description="Pump phase, rad")

    @classmethod
    def from_hz(cls, amplitude_a0: float, nu_hz: float, phi: float = 0.0) -> "PumpConfig":
        return cls(amplitude_a0=amplitude_a0, nu=TWO_PI * nu_hz, phi=phi)

    @property
    def nu_hz(self) -> float:
        return self.nu / TWO_PI

    @property
    def complex_amplitude(self) -> complex:
        """Ẽ_p = A0 e^{−iφ}."""
        return self.amplitude_a0 * complex(math.cos(self.phi), -math.sin(self.phi))


class InitialConditions(BaseModel):
    """Complex envelopes Ẽ_e(0), Ẽ_g(0)."""

    model_config = ConfigDict(frozen=True)

    envelope_e0: ComplexAmplitude = Field(default_factory=lambda: ComplexAmplitude(re=1.0))
    envelope_g0: ComplexAmplitude = Field(default_factory=ComplexAmplitude)

    @classmethod
    def of(cls, e0: complex, g0: complex = 0j) -> "InitialConditions":
        return cls(envelope_e0=ComplexAmplitude.of(e0), envelope_g0=ComplexAmplitude.of(g0))

    @property
    def e0(self) -> complex:
        return self.envelope_e0.value

    @property
    def g0(self) -> complex:
        return self.envelope_g0.value


class Detunings(BaseModel):
    """Pump detunings from the difference and sum frequencies, rad/s."""

    model_config = ConfigDict(frozen=True)

    delta: float
    delta_s: float


class GainReport(BaseModel):
    """Gain classification of one configuration."""

    model_config = ConfigDict(frozen=True)

    branch: Branch
    gain_rate: ComplexAmplitude
    regime: Regime
    threshold_margin: float = Field(ge=0.0)
    symmetry: int = Field(ge=-1, le=1)
    detunings: Detunings
    threshold: Optional[float] = None
    fitted_rate: Optional[float] = None

    @model_validator(mode="after")
    def _amplify_iff_growth(self) -> "GainReport":
        if (self.regime is Regime.AMPLIFY) != (self.gain_rate.re > 0.0):
            raise ValueError("regime Amplify must coincide with Re(gain_rate) > 0")
        return self


class ClosedFormSolution(BaseModel):
    """Gain parameters and rate of one branch."""

    model_config = ConfigDict(frozen=True)

    branch: Branch
    gain_rate: ComplexAmplitude
    alpha: ComplexAmplitude
    beta: ComplexAmplitude
    detuning: float

    @property
    def a(self) -> float:
        return self.gain_rate.re

    @property
    def b(self) -> float:
        return self.gain_rate.im


class IntegratorSettings(BaseModel):
    """Step, tolerance and sampling controls for the simulators."""

    model_config = ConfigDict(frozen=True)

    t_end: float = Field(gt=0.0, description="Duration, s")
    dt: Optional[float] = Field(default=None, gt=0.0, description="Step (full) or sample spacing (envelope)")
    rtol: float = Field(default=1e-10, ge=1e-12, le=1e-6)
    atol: float = Field(default=1e-12, gt=0.0)
    sample_stride: int = Field(default=1, ge=1)


# ---------------------------------------------------------------------------
# Array-carrying types
# ---------------------------------------------------------------------------


class _ArrayModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class TimeSeries(_ArrayModel):
    """Uniformly sampled real fields, optionally with their time derivatives."""

    dt: float = Field(gt=0.0)
    t0: float = 0.0
    samples_e: np.ndarray
    samples_g: np.ndarray
    velocity_e: Optional[np.ndarray] = None
    velocity_g: Optional[np.ndarray] = None

    @field_validator("samples_e", "samples_g", "velocity_e", "velocity_g", mode="before")
    @classmethod
    def _as_float_array(cls, value: Any) -> Any:
        if value is None:
            return None
        return np.asarray(value, dtype=float)

    @model_validator(mode="after")
    def _consistent_lengths(self) -> "TimeSeries":
        n = self.samples_e.shape[0]
        if n < 2:
            raise ValueError("time series needs at least two samples")
        for arr in (self.samples_g, self.velocity_e, self.velocity_g):
            if arr is not None and arr.shape != (n,):
                raise ValueError("all channels must have the same length")
        return self

    @property
    def n_samples(self) -> int:
        return int(self.samples_e.shape[0])

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_samples)

    @property
    def has_velocity(self) -> bool:
        return self.velocity_e is not None and self.velocity_g is not None

    def channel(self, channel: Channel) -> np.ndarray:
        return self.samples_e if channel is Channel.E else self.samples_g


class EnvelopeSeries(_ArrayModel):
    """Uniformly sampled complex fields Ẽ_e(t), Ẽ_g(t), carrier included."""

    dt: float = Field(gt=0.0)
    t0: float = 0.0
    envelope_e: np.ndarray
    envelope_g: np.ndarray
    form: Optional[EnvelopeForm] = None

    @field_validator("envelope_e", "envelope_g", mode="before")
    @classmethod
    def _as_complex_array(cls, value: Any) -> Any:
        return np.asarray(value, dtype=complex)

    @model_validator(mode="after")
    def _consistent_lengths(self) -> "EnvelopeSeries":
        if self.envelope_e.shape != self.envelope_g.shape or self.envelope_e.shape[0] < 2:
            raise ValueError("envelope channels must match and hold at least two samples")
        return self

    @property
    def n_samples(self) -> int:
        return int(self.envelope_e.shape[0])

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_samples)

    def to_time_series(self) -> TimeSeries:
        """Real fields E = Re Ẽ."""
        return TimeSeries(
            dt=self.dt,
            t0=self.t0,
            samples_e=self.envelope_e.real,
            samples_g=self.envelope_g.real,
        )


class EnergyFlow(_ArrayModel):
    """Driving-term power into each mode and its running integral."""

    dt: float = Field(gt=0.0)
    t0: float = 0.0
    flow_e: np.ndarray
    flow_g: np.ndarray
    work_e: np.ndarray
    work_g: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.flow_e.shape[0])


class Spectrum(_ArrayModel):
    """Single-sided magnitude spectrum."""

    freq_hz: np.ndarray
    magnitude: np.ndarray
    window: Window = Window.HANN
    n_samples: int = Field(ge=1)

    @field_validator("freq_hz", "magnitude", mode="before")
    @classmethod
    def _as_float_array(cls, value: Any) -> Any:
        return np.asarray(value, dtype=float)

    @model_validator(mode="after")
    def _monotone_half_spectrum(self) -> "Spectrum":
        if self.freq_hz.shape != self.magnitude.shape:
            raise ValueError("freq_hz and magnitude must have the same length")
        if self.freq_hz.size and self.freq_hz[0] < 0.0:
            raise ValueError("spectrum must be single-sided")
        if np.any(np.diff(self.freq_hz) <= 0.0):
            raise ValueError("freq_hz must be strictly increasing")
        return self

    @property
    def bin_hz(self) -> float:
        if self.freq_hz.size < 2:
            return 0.0
        return float(self.freq_hz[1] - self.freq_hz[0])


# ---------------------------------------------------------------------------
# Cavity
# ---------------------------------------------------------------------------


class CavityConfig(BaseModel):
    """Feedback-loop waveguide with a receiver antenna at x_r."""

    model_config = ConfigDict(frozen=True)

    omega_e: float = Field(gt=0.0)
    omega_g: float = Field(gt=0.0)
    wave_speed: float = Field(default=1.0, gt=0.0)
    chi: float = Field(gt=0.0, description="Mixer output efficiency")
    x_r: float = Field(default=0.0, ge=0.0, description="Receiver antenna position, m")
    amplitude_a0: float = Field(default=1.0, ge=0.0)
    nu: float = Field(gt=0.0)
    phi: float = 0.0

    @model_validator(mode="after")
    def _ordered_wavenumbers(self) -> "CavityConfig":
        if not self.omega_e > self.omega_g:
            raise ValueError("k_e must exceed k_g")
        return self

    @classmethod
    def from_hz(
        cls,
        omega_e_hz: float,
        omega_g_hz: float,
        chi: float,
        nu_hz: float,
        x_r: float = 0.0,
        amplitude_a0: float = 1.0,
        wave_speed: float = 1.0,
    ) -> "CavityConfig":
        return cls(
            omega_e=TWO_PI * omega_e_hz,
            omega_g=TWO_PI * omega_g_hz,
            chi=chi,
            nu=TWO_PI * nu_hz,
            x_r=x_r,
            amplitude_a0=amplitude_a0,
            wave_speed=wave_speed,
        )

    @property
    def k_e(self) -> float:
        return self.omega_e / self.wave_speed

    @property
    def k_g(self) -> float:
        return self.omega_g / self.wave_speed

    @property
    def wavelength_e(self) -> float:
        return TWO_PI / self.k_e

    @property
    def wavelength_g(self) -> float:
        return TWO_PI / self.k_g

    @property
    def pump(self) -> PumpConfig:
        return PumpConfig(amplitude_a0=self.amplitude_a0, nu=self.nu, phi=self.phi)


class WindowInterval(BaseModel):
    """An antenna-position interval (metres) where the couplings have opposite sign."""

    model_config = ConfigDict(frozen=True)

    start: float
    end: float
    m: Optional[int] = None

    @property
    def width(self) -> float:
        return self.end - self.start

    def contains(self, x: float) -> bool:
        return self.start < x < self.end


class DpaWindows(BaseModel):
    """Quarter-wavelength bracket windows next to the exact sign-derived ones."""

    model_config = ConfigDict(frozen=True)

    bracketed: List[WindowInterval] = Field(default_factory=list)
    exact: List[WindowInterval] = Field(default_factory=list)
    bracketed_is_subset: bool = True


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


class SweepAxis(BaseModel):
    """One swept parameter; nu_hz in Hz, x_r in metres."""

    model_config = ConfigDict(frozen=True)

    parameter: SweepParameter
    min: float
    max: float
    count: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered_bounds(self) -> "SweepAxis":
        if not self.max > self.min:
            raise ValueError("axis max must exceed min")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


class SweepSpec(BaseModel):
    """A one- or two-axis parameter sweep around a fixed baseline."""

    model_config = ConfigDict(frozen=True)

    axis1: SweepAxis
    axis2: Optional[SweepAxis] = None
    system: SystemConfig
    pump: PumpConfig
    init: InitialConditions = Field(default_factory=InitialConditions)
    metric: SweepMetric = SweepMetric.ANALYTIC_RE_OMEGA
    horizon_s: Optional[float] = Field(default=None, gt=0.0)
    simulator: Simulator = Simulator.ENVELOPE
    cavity: Optional[CavityConfig] = None

    @model_validator(mode="after")
    def _cavity_for_antenna_axis(self) -> "SweepSpec":
        axes = [self.axis1] + ([self.axis2] if self.axis2 else [])
        if any(axis.parameter is SweepParameter.X_R for axis in axes) and self.cavity is None:
            raise ValueError("an x_r axis needs a cavity configuration")
        if self.axis2 is not None and self.axis2.parameter is self.axis1.parameter:
            raise ValueError("axis1 and axis2 must sweep different parameters")
        return self

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.axis1.count, self.axis2.count if self.axis2 else 1)


class SweepCell(BaseModel):
    """One evaluated grid cell; `error` is set instead of raising."""

    model_config = ConfigDict(frozen=True)

    index: int
    axis1_value: float
    axis2_value: Optional[float] = None
    metric: Optional[float] = None
    report: Optional[GainReport] = None
    simulated_amplify: Optional[bool] = None
    error: Optional[str] = None

    @property
    def label(self) -> str:
        if self.error is not None:
            return "error"
        return self.report.regime.value if self.report else ""


class SweepResult(BaseModel):
    """Row-major grid of evaluated cells."""

    model_config = ConfigDict(frozen=True)

    spec: SweepSpec
    cells: List[SweepCell] = Field(default_factory=list)

    def metric_grid(self) -> np.ndarray:
        values = [np.nan if c.metric is None else c.metric for c in self.cells]
        return np.asarray(values, dtype=float).reshape(self.spec.shape)

    def symmetry_grid(self) -> np.ndarray:
        values = [0 if c.report is None else c.report.symmetry for c in self.cells]
        return np.asarray(values, dtype=int).reshape(self.spec.shape)

    def label_grid(self) -> np.ndarray:
        return np.asarray([c.label for c in self.cells], dtype=object).reshape(self.spec.shape)

    @property
    def errors(self) -> List[SweepCell]:
        return [c for c in self.cells if c.error is not None]


# ---------------------------------------------------------------------------
# Quantum
# ---------------------------------------------------------------------------


class TruncatedOperator(_ArrayModel):
    """Dense operator on the truncated two-mode Fock space, index n_e·(n_max+1) + n_g.

    `terms` keeps the free part and the four interaction terms separately so the
    evolution can attach their rotating-frame phases.
    """

    n_max: int = Field(ge=1)
    matrix: np.ndarray
    terms: Dict[str, np.ndarray] = Field(default_factory=dict)
    omega_e: float = 0.0
    omega_g: float = 0.0
    nu: Optional[float] = None

    @model_validator(mode="after")
    def _square_dimension(self) -> "TruncatedOperator":
        dim = (self.n_max + 1) ** 2
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"operator must be {dim}x{dim} for n_max={self.n_max}")
        return self

    @property
    def dimension(self) -> int:
        return (self.n_max + 1) ** 2


class QuantumState(_ArrayModel):
    """Coefficient vector on the truncated basis; the norm is not forced to 1."""

    n_max: int = Field(ge=1)
    coefficients: np.ndarray

    @field_validator("coefficients", mode="before")
    @classmethod
    def _as_complex_vector(cls, value: Any) -> Any:
        return np.asarray(value, dtype=complex)

    @model_validator(mode="after")
    def _matching_dimension(self) -> "QuantumState":
        if self.coefficients.shape != ((self.n_max + 1) ** 2,):
            raise ValueError("coefficient vector does not match n_max")
        return self

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))


class QuantumTrajectory(_ArrayModel):
    """Expectation values along a quantum evolution."""

    times: np.ndarray
    a_e: np.ndarray
    a_g: np.ndarray
    energy: np.ndarray
    energy_raw: np.ndarray
    norm: np.ndarray
    n_e: np.ndarray
    n_g: np.ndarray
    final_state: Optional[QuantumState] = None

    @property
    def total_number(self) -> np.ndarray:
        return self.n_e + self.n_g


# ---------------------------------------------------------------------------
# Run files and provenance
# ---------------------------------------------------------------------------


class PumpFile(BaseModel):
    a0: float = Field(default=1.0, ge=0.0)
    nu_hz: float = Field(gt=0.0)
    phi_rad: float = 0.0


class InitFile(BaseModel):
    e0_re: float = 1.0
    e0_im: float = 0.0
    g0_re: float = 0.0
    g0_im: float = 0.0


class RunConfigFile(BaseModel):
    """JSON run configuration, frequencies in Hz."""

    model_config = ConfigDict(extra="forbid")

    omega_e_hz: float = Field(gt=0.0)
    omega_g_hz: float = Field(gt=0.0)
    chi_e: float
    chi_g: float
    pump: PumpFile
    init: InitFile = Field(default_factory=InitFile)
    t_end_s: Optional[float] = Field(default=None, gt=0.0)
    dt_s: Optional[float] = Field(default=None, gt=0.0)
    sample_stride: int = Field(default=1, ge=1)

    def to_system(self) -> SystemConfig:
        return SystemConfig.from_hz(self.omega_e_hz, self.omega_g_hz, self.chi_e, self.chi_g)

    def to_pump(self) -> PumpConfig:
        return PumpConfig.from_hz(self.pump.a0, self.pump.nu_hz, self.pump.phi_rad)

    def to_init(self) -> InitialConditions:
        return InitialConditions.of(
            complex(self.init.e0_re, self.init.e0_im), complex(self.init.g0_re, self.init.g0_im)
        )


class CavityFile(BaseModel):
    chi: float = Field(gt=0.0)
    wave_speed: float = Field(default=1.0, gt=0.0)
    x_r: float = Field(default=0.0, ge=0.0)


class SweepSpecFile(BaseModel):
    """JSON sweep specification, frequencies in Hz."""

    model_config = ConfigDict(extra="forbid")

    axis1: SweepAxis
    axis2: Optional[SweepAxis] = None
    base: RunConfigFile
    metric: SweepMetric = SweepMetric.ANALYTIC_RE_OMEGA
    horizon_s: Optional[float] = Field(default=None, gt=0.0)
    simulator: Simulator = Simulator.ENVELOPE
    cavity: Optional[CavityFile] = None

    def to_spec(self) -> SweepSpec:
        cavity = None
        if self.cavity is not None:
            cavity = CavityConfig.from_hz(
                self.base.omega_e_hz,
                self.base.omega_g_hz,
                chi=self.cavity.chi,
                nu_hz=self.base.pump.nu_hz,
                x_r=self.cavity.x_r,
                amplitude_a0=self.base.pump.a0,
                wave_speed=self.cavity.wave_speed,
            )
        return SweepSpec(
            axis1=self.axis1,
            axis2=self.axis2,
            system=self.base.to_system(),
            pump=self.base.to_pump(),
            init=self.base.to_init(),
            metric=self.metric,
            horizon_s=self.horizon_s,
            simulator=self.simulator,
            cavity=cavity,
        )


class QuantumConfigFile(BaseModel):
    """JSON configuration for the Fock-space evolution (ħ = 1, angular units)."""

    model_config = ConfigDict(extra="forbid")

    omega_e: float = Field(default=1.46, gt=0.0)
    omega_g: float = Field(default=1.24, gt=0.0)
    nu: Optional[float] = Field(default=None, gt=0.0)
    chi_e: ComplexAmplitude = Field(default_factory=lambda: ComplexAmplitude(re=0.02))
    chi_g: ComplexAmplitude = Field(default_factory=lambda: ComplexAmplitude(re=-0.02))
    pump: ComplexAmplitude = Field(default_factory=lambda: ComplexAmplitude(re=1.0))
    alpha_e: ComplexAmplitude = Field(default_factory=lambda: ComplexAmplitude(re=0.05))
    alpha_g: ComplexAmplitude = Field(default_factory=lambda: ComplexAmplitude(re=0.05))
    n_max: int = Field(default=8, ge=1)
    t_end: Optional[float] = Field(default=None, gt=0.0, description="Defaults to one gain time")
    dt: Optional[float] = Field(default=None, gt=0.0)
    sample_stride: int = Field(default=10, ge=1)


class RunManifest(BaseModel):
    """Provenance record written after every successful command."""

    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    version: str
    wall_time_s: float = Field(ge=0.0)
    outputs: List[str] = Field(default_factory=list)
