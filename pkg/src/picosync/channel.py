"""Line-of-sight channel: true propagation delay plus complex AWGN."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._memo import array_memo
from .errors import ParameterDomainError, WindowOverrunError
from .waveform import SampledSignal

__all__ = [
    "ChannelModel",
    "propagate",
    "add_awgn",
    "capture_noise",
    "interior_power",
    "noise_power_for",
    "fractional_shift",
]

# Phase-ramp buffers are at least this many times the pulse length.
PAD_FACTOR = 4

@dataclass(frozen=True)
class ChannelModel:
    """Quasi-static link between two nodes.

    ``snr_db`` is the pre-processing SNR on the pulse interior; ``inf``
    disables noise.
    """

    propagation_delay_s: float = 3e-9
    snr_db: float = 36.0
    symmetric: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if not self.propagation_delay_s >= 0:
            raise ParameterDomainError("propagation_delay_s must be >= 0")
        if math.isnan(self.snr_db):
            raise ParameterDomainError("snr_db must not be NaN")

    @property
    def noiseless(self) -> bool:
        return self.snr_db == math.inf


def interior_power(signal: SampledSignal) -> float:
    """Mean power of the pulse samples between the rise and fall ramps."""
    return float(np.mean(np.abs(signal.interior) ** 2))


def noise_power_for(signal: SampledSignal, snr_db: float) -> float:
    p = interior_power(signal)
    if not p > 0:
        raise ParameterDomainError("signal has zero interior power")
    return p / 10.0 ** (snr_db / 10.0)


def _complex_noise(n: int, power: float, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def add_awgn(signal: SampledSignal, snr_db: float, seed) -> SampledSignal:
    """Add circular complex white noise at ``snr_db`` below the interior power."""
    if snr_db == math.inf:
        return signal
    power = noise_power_for(signal, snr_db)
    noisy = signal.samples + _complex_noise(len(signal), power, seed)
    return SampledSignal(noisy, signal.sample_rate_hz, signal.start_time_s,
                         signal.edge_samples)


def capture_noise(n: int, noise_power: float, sample_rate_hz: float, seed,
                  start_time_s: float = 0.0) -> SampledSignal:
    """A receive capture taken while nothing is transmitting."""
    return SampledSignal(_complex_noise(n, noise_power, seed), sample_rate_hz,
                         start_time_s)


def _buffer_len(n_pulse: int, window_len: int) -> int:
    need = max(PAD_FACTOR * n_pulse, 2 * (window_len + n_pulse))
    return 1 << (need - 1).bit_length()


def _spectrum(signal: SampledSignal, m: int) -> np.ndarray:
    x = signal.samples
    return array_memo(x, ("fft", m), lambda: np.fft.fft(x, m))


def fractional_shift(signal: SampledSignal, frac: float, m: int) -> np.ndarray:
    """Delay by ``frac`` samples with a linear phase ramp on an m-point grid.

    Returns the full circular buffer; negative-time ringing wraps to its end.
    """
    if frac == 0.0:
        buf = np.zeros(m, dtype=np.complex128)
        buf[: len(signal)] = signal.samples
        return buf
    f = np.fft.fftfreq(m)
    return np.fft.ifft(_spectrum(signal, m) * np.exp(-2j * np.pi * f * frac))


def propagate(signal: SampledSignal, ch: ChannelModel, window_start_s: float,
              window_len: int) -> SampledSignal:
    """Receive ``signal`` through ``ch`` in a gate opening at ``window_start_s``.

    ``signal.start_time_s`` is the true emission time. The whole-sample part
    of the arrival offset is applied by placement inside the window and the
    remainder by a spectral phase ramp. Noise power is set from the interior
    power of the transmitted pulse.
    """
    fs = signal.sample_rate_hz
    n = len(signal)
    offset = (signal.start_time_s + ch.propagation_delay_s - window_start_s) * fs
    k0 = math.floor(offset)
    frac = offset - k0
    if frac >= 1.0:  # guards rounding when offset is a hair below an integer
        k0, frac = k0 + 1, 0.0
    if k0 < 0 or k0 + n + (frac > 0) > window_len:
        raise WindowOverrunError(
            f"pulse spans samples [{offset:.3f}, {offset + n:.3f}) "
            f"outside receive window of {window_len}"
        )

    m = _buffer_len(n, window_len)
    buf = fractional_shift(signal, frac, m)
    idx = (np.arange(window_len) - k0) % m
    rx = buf[idx]
    if not ch.noiseless:
        power = noise_power_for(signal, ch.snr_db)
        rx = rx + _complex_noise(window_len, power, ch.rng_seed)
    return SampledSignal(rx, fs, window_start_s)
