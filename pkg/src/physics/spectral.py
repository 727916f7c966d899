"""Windowed FFT spectra and envelope growth-rate estimation."""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import fft, stats
from scipy.signal import windows

from ..errors import NotGrowingError, TooShortError
from ..schemas import Channel, Spectrum, TimeSeries, Window

logger = logging.getLogger(__name__)

MIN_SAMPLES = 1024
MIN_R_SQUARED = 0.99
FIT_TAIL_FRACTION = 0.6


def _window(kind: Window, n: int) -> np.ndarray:
    if kind is Window.HANN:
        return windows.hann(n, sym=False)
    return np.ones(n)


def fft_spectrum(ts: TimeSeries, channel: Channel = Channel.E, window: Window = Window.HANN) -> Spectrum:
    """Single-sided magnitude spectrum; a bin-centred unit sinusoid peaks at 1.0."""
    n = ts.n_samples
    if n < MIN_SAMPLES:
        raise TooShortError(f"spectrum needs at least {MIN_SAMPLES} samples, got {n}")
    taper = _window(window, n)
    coefficients = fft.rfft(ts.channel(channel) * taper)
    magnitude = 2.0 * np.abs(coefficients) / taper.sum()
    magnitude[0] *= 0.5
    if n % 2 == 0:
        magnitude[-1] *= 0.5
    return Spectrum(
        freq_hz=fft.rfftfreq(n, d=ts.dt),
        magnitude=magnitude,
        window=window,
        n_samples=n,
    )


def restrict_band(spectrum: Spectrum, low_hz: float, high_hz: float) -> Spectrum:
    mask = (spectrum.freq_hz >= low_hz) & (spectrum.freq_hz <= high_hz)
    return Spectrum(
        freq_hz=spectrum.freq_hz[mask],
        magnitude=spectrum.magnitude[mask],
        window=spectrum.window,
        n_samples=spectrum.n_samples,
    )


def _window_response(kind: Window, offset: float) -> float:
    """Main-lobe response at `offset` bins, normalized to 1 at 0."""
    if kind is Window.HANN:
        if abs(abs(offset) - 1.0) < 1e-12:
            return 0.5
        return float(np.sinc(offset) / (1.0 - offset**2))
    return float(np.sinc(offset))


def dominant_peak(s: Spectrum) -> Tuple[float, float]:
    """Strongest peak with log-parabolic sub-bin interpolation.

    Ties resolve to the lowest index. The amplitude is corrected for the
    window's scalloping at the interpolated offset.
    """
    if s.magnitude.size == 0:
        raise ValueError("empty spectrum")
    k = int(np.argmax(s.magnitude))
    peak = float(s.magnitude[k])
    if k == 0 or k == s.magnitude.size - 1:
        return float(s.freq_hz[k]), peak

    left, right = float(s.magnitude[k - 1]), float(s.magnitude[k + 1])
    if min(left, peak, right) <= 0.0:
        return float(s.freq_hz[k]), peak
    la, lb, lc = math.log(left), math.log(peak), math.log(right)
    denominator = la - 2.0 * lb + lc
    offset = 0.0 if denominator == 0.0 else 0.5 * (la - lc) / denominator
    offset = max(-0.5, min(0.5, offset))

    frequency = float(s.freq_hz[k]) + offset * s.bin_hz
    amplitude = peak / _window_response(s.window, offset)
    return frequency, amplitude


def peak_width_hz(s: Spectrum) -> float:
    """Full width at half maximum of the dominant peak, linearly interpolated."""
    k = int(np.argmax(s.magnitude))
    half = 0.5 * s.magnitude[k]
    mag = s.magnitude
    freq = s.freq_hz

    lo = k
    while lo > 0 and mag[lo - 1] > half:
        lo -= 1
    hi = k
    while hi < mag.size - 1 and mag[hi + 1] > half:
        hi += 1

    def crossing(inner: int, outer: int) -> float:
        if outer == inner or mag[inner] == mag[outer]:
            return float(freq[inner])
        frac = (mag[inner] - half) / (mag[inner] - mag[outer])
        return float(freq[inner] + frac * (freq[outer] - freq[inner]))

    left = crossing(lo, max(lo - 1, 0))
    right = crossing(hi, min(hi + 1, mag.size - 1))
    return right - left


def fit_envelope_rate(
    times: np.ndarray,
    envelope: np.ndarray,
    tail_fraction: float = FIT_TAIL_FRACTION,
) -> Tuple[float, float]:
    """Slope and R² of a linear fit to log|envelope| over the trailing part of the record."""
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    times = np.asarray(times, dtype=float)
    magnitude = np.abs(np.asarray(envelope))
    start = int(round((1.0 - tail_fraction) * times.size))
    times, magnitude = times[start:], magnitude[start:]
    if times.size < 3 or np.any(magnitude <= 0.0) or not np.all(np.isfinite(magnitude)):
        raise NotGrowingError("envelope record unsuitable for a log-linear fit")

    fit = stats.linregress(times, np.log(magnitude))
    r_squared = fit.rvalue**2
    logger.debug("Envelope fit slope=%.6g R2=%.6f", fit.slope, r_squared)
    if not fit.slope > 0.0:
        raise NotGrowingError(f"envelope does not grow (slope={fit.slope:.3g})")
    if not r_squared >= MIN_R_SQUARED:
        raise NotGrowingError(f"growth is not exponential (R2={r_squared:.4f})")
    return float(fit.slope), float(r_squared)


def demodulate(ts: TimeSeries, channel: Channel, carrier_hz: float) -> Tuple[np.ndarray, np.ndarray]:
    """Complex envelope at `carrier_hz`, low-passed by a one-period moving average.

    Returns centred sample times and the envelope.
    """
    times = ts.times
    baseband = 2.0 * ts.channel(channel) * np.exp(-2j * math.pi * carrier_hz * times)
    length = max(1, int(round(1.0 / (carrier_hz * ts.dt))))
    if length >= baseband.size:
        raise NotGrowingError("record shorter than one carrier period")
    smoothed = np.convolve(baseband, np.ones(length) / length, mode="valid")
    centred = times[: smoothed.size] + 0.5 * (length - 1) * ts.dt
    return centred, smoothed


def fit_growth_rate(
    ts: TimeSeries,
    channel: Channel,
    carrier_hz: float,
    tail_fraction: Optional[float] = None,
) -> float:
    """Envelope growth rate in 1/s (a/2 for a cosh(at/2) envelope)."""
    centred, smoothed = demodulate(ts, channel, carrier_hz)
    if tail_fraction is None:
        tail_fraction = FIT_TAIL_FRACTION
    rate, _ = fit_envelope_rate(centred, smoothed, tail_fraction)
    return rate
