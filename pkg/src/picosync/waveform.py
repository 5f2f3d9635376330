"""Pulsed two-tone and LFM waveform synthesis at complex baseband."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterDomainError

__all__ = [
    "WaveformKind",
    "WaveformSpec",
    "SampledSignal",
    "synthesize",
    "apply_envelope",
    "sample_count",
]


class WaveformKind(str, enum.Enum):
    TWO_TONE = "two-tone"
    LFM = "lfm"


@dataclass(frozen=True)
class WaveformSpec:
    """Parameters of a single time-transfer pulse.

    ``bandwidth_hz`` is the tone separation for a two-tone pulse and the
    total sweep extent for an LFM pulse. ``amplitude`` is the RMS amplitude
    of the pulse interior, so both kinds carry the same energy.
    """

    kind: WaveformKind = WaveformKind.TWO_TONE
    bandwidth_hz: float = 40e6
    pulse_duration_s: float = 10e-6
    rise_fall_s: float = 50e-9
    sample_rate_hz: float = 200e6
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", WaveformKind(self.kind))

    def validate(self) -> None:
        if not self.sample_rate_hz > 0:
            raise ParameterDomainError("sample_rate_hz must be > 0")
        if not self.pulse_duration_s > 0:
            raise ParameterDomainError("pulse_duration_s must be > 0")
        if not self.amplitude > 0:
            raise ParameterDomainError("amplitude must be > 0")
        if not self.bandwidth_hz >= 0:
            raise ParameterDomainError("bandwidth_hz must be >= 0")
        if not self.bandwidth_hz < self.sample_rate_hz:
            raise ParameterDomainError(
                "bandwidth_hz must be < sample_rate_hz (complex Nyquist)"
            )
        if not 0 <= self.rise_fall_s <= self.pulse_duration_s / 2:
            raise ParameterDomainError(
                "rise_fall_s must lie in [0, pulse_duration_s / 2]"
            )

    @property
    def sample_period_s(self) -> float:
        return 1.0 / self.sample_rate_hz


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Complex baseband samples with their sample rate and start time.

    ``edge_samples`` records how many samples at each end belong to a
    rise/fall ramp; the remaining interior is what SNR is defined on.
    """

    samples: np.ndarray
    sample_rate_hz: float
    start_time_s: float = 0.0
    edge_samples: int = field(default=0)

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.complex128)
        if x.ndim != 1 or x.size == 0:
            raise ParameterDomainError("samples must be a non-empty 1-D sequence")
        if not self.sample_rate_hz > 0:
            raise ParameterDomainError("sample_rate_hz must be > 0")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def sample_period_s(self) -> float:
        return 1.0 / self.sample_rate_hz

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2)) / self.sample_rate_hz

    @property
    def interior(self) -> np.ndarray:
        e = self.edge_samples
        if e and 2 * e < self.samples.size:
            return self.samples[e:-e]
        return self.samples

    def with_start(self, start_time_s: float) -> "SampledSignal":
        """Same samples (shared, read-only) stamped with a new start time."""
        return SampledSignal(self.samples, self.sample_rate_hz, start_time_s,
                             self.edge_samples)

    def times(self) -> np.ndarray:
        return self.start_time_s + np.arange(self.samples.size) / self.sample_rate_hz


def sample_count(duration_s: float, sample_rate_hz: float) -> int:
    # Python's round() is half-to-even, which keeps the count platform-stable.
    return int(round(duration_s * sample_rate_hz))


def _raised_cosine_ramp(n_ramp: int) -> np.ndarray:
    n = np.arange(n_ramp)
    return 0.5 * (1.0 - np.cos(np.pi * n / n_ramp))


def apply_envelope(signal: SampledSignal, rise_fall_s: float) -> SampledSignal:
    """Taper both ends of a pulse with raised-cosine ramps.

    The rise ramp starts at zero on sample 0 and reaches half amplitude at
    ``rise_fall_s / 2``; the fall ramp mirrors it against the pulse end
    ``len(signal) / fs``. Samples between the ramps are left untouched.
    """
    if rise_fall_s < 0:
        raise ParameterDomainError("rise_fall_s must be >= 0")
    n = len(signal)
    if rise_fall_s > signal.duration_s / 2:
        raise ParameterDomainError("rise_fall_s longer than half the pulse")
    n_ramp = sample_count(rise_fall_s, signal.sample_rate_hz)
    if n_ramp == 0:
        return signal
    if 2 * n_ramp > n:
        raise ParameterDomainError("rise_fall_s longer than half the pulse")

    env = np.ones(n)
    ramp = _raised_cosine_ramp(n_ramp)
    env[:n_ramp] = ramp
    # fall side is evaluated at the distance to the pulse end (m = 1..n_ramp)
    m = np.arange(1, n_ramp + 1)
    env[n - n_ramp:] = (0.5 * (1.0 - np.cos(np.pi * m / n_ramp)))[::-1]
    return SampledSignal(
        signal.samples * env,
        signal.sample_rate_hz,
        signal.start_time_s,
        edge_samples=n_ramp,
    )


def synthesize(spec: WaveformSpec, start_time_s: float = 0.0) -> SampledSignal:
    """Build the sampled pulse described by ``spec``.

    Two-tone pulses are the sum of tones at +/- bandwidth/2, both at zero
    phase on the first sample. LFM pulses sweep linearly from -bandwidth/2
    to +bandwidth/2 across the pulse. Both are scaled to RMS ``amplitude``
    and then tapered by :func:`apply_envelope`.
    """
    spec.validate()
    fs = spec.sample_rate_hz
    n = sample_count(spec.pulse_duration_s, fs)
    if n < 3:
        raise ParameterDomainError("pulse shorter than three samples")
    t = np.arange(n) / fs
    bw = spec.bandwidth_hz

    if spec.kind is WaveformKind.TWO_TONE:
        x = (np.exp(1j * np.pi * bw * t) + np.exp(-1j * np.pi * bw * t)) / np.sqrt(2.0)
    else:
        rate = bw / spec.pulse_duration_s
        x = np.exp(1j * (np.pi * rate * t**2 - np.pi * bw * t))
    x = spec.amplitude * x
    return apply_envelope(SampledSignal(x, fs, start_time_s), spec.rise_fall_s)
