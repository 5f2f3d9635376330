"""Sub-sample delay estimation around the matched-filter peak, with bias correction.

Delays are measured from the first sample of the received capture to the
first sample of the pulse inside it.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import kernels
from ._memo import array_memo
from .channel import ChannelModel, propagate
from .errors import BoundaryError, FlatPeakError, ParameterDomainError
from .waveform import SampledSignal, WaveformSpec, synthesize

__all__ = [
    "MatchedFilterOutput",
    "DelayEstimate",
    "BiasLut",
    "matched_filter",
    "coarse_peak",
    "qls_refine",
    "estimate_delay",
    "build_bias_lut",
    "correct_bias",
    "estimate_snr",
    "save_lut",
    "load_lut",
    "LUT_FORMAT_VERSION",
    "noiseless_bias",
    "gate_half_width",
]

LUT_FORMAT_VERSION = 1
DEFAULT_LUT_BINS = 1024
# Receive-gate guard (samples) on each side of the expected pulse position.
DEFAULT_GUARD_SAMPLES = 128

@dataclass(frozen=True, eq=False)
class MatchedFilterOutput:
    metric: np.ndarray
    lag_zero_index: int
    sample_rate_hz: float

    def __post_init__(self):
        if self.metric.size < 3:
            raise ParameterDomainError("matched-filter output needs >= 3 samples")

    @property
    def sample_period_s(self) -> float:
        return 1.0 / self.sample_rate_hz

    def lag_of(self, index: int) -> int:
        return index - self.lag_zero_index


@dataclass(frozen=True)
class DelayEstimate:
    coarse_index: int
    refined_delay_s: float
    corrected_delay_s: float
    peak_metric: float


@dataclass(frozen=True, eq=False)
class BiasLut:
    """QLS bias versus fractional delay for one waveform.

    Bins are keyed by the *estimated* fractional delay, uniformly spaced on
    [0, 1), since that is the only quantity known when correcting.
    """

    waveform: WaveformSpec
    fractional_delay: np.ndarray
    bias_s: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.fractional_delay, dtype=float)
        b = np.asarray(self.bias_s, dtype=float)
        if f.shape != b.shape or f.ndim != 1:
            raise ParameterDomainError("LUT columns must be equal-length 1-D arrays")
        if not np.all(np.isfinite(b)):
            raise ParameterDomainError("LUT bias values must be finite")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise ParameterDomainError("LUT fractional delays must increase")
        object.__setattr__(self, "fractional_delay", f)
        object.__setattr__(self, "bias_s", b)

    @property
    def bin_count(self) -> int:
        return self.fractional_delay.size

    @property
    def bins(self):
        return list(zip(self.fractional_delay.tolist(), self.bias_s.tolist()))

    def lookup(self, frac):
        """Periodic linear interpolation of the bias at ``frac`` (mod 1)."""
        return np.interp(np.mod(frac, 1.0), self.fractional_delay, self.bias_s,
                         period=1.0)

    @classmethod
    def zeros(cls, waveform: WaveformSpec, bin_count: int = DEFAULT_LUT_BINS):
        f = np.arange(bin_count) / bin_count
        return cls(waveform, f, np.zeros(bin_count))


def _check_rates(a: SampledSignal, b: SampledSignal):
    if not math.isclose(a.sample_rate_hz, b.sample_rate_hz, rel_tol=1e-12):
        raise ParameterDomainError(
            f"sample-rate mismatch: {a.sample_rate_hz} vs {b.sample_rate_hz}"
        )


def _ref_spectrum(ref: SampledSignal, m: int) -> np.ndarray:
    x = ref.samples
    return array_memo(x, ("conj-fft", m), lambda: np.conj(np.fft.fft(x, m)))


def matched_filter(rx: SampledSignal, tx_ref: SampledSignal,
                   lags: tuple[int, int] | None = None) -> MatchedFilterOutput:
    """Magnitude of the complex correlation of ``rx`` against ``tx_ref``.

    With ``lags=None`` every lag at which the reference fits inside ``rx``
    is evaluated through a zero-padded spectral product. A ``(lo, hi)``
    pair restricts evaluation to lags ``lo <= k < hi``, computed directly
    by the kernel backend; this is what a tracking receiver uses.
    """
    _check_rates(rx, tx_ref)
    n_rx, n_ref = len(rx), len(tx_ref)
    if n_rx < n_ref:
        raise ParameterDomainError("rx shorter than the reference")
    n_valid = n_rx - n_ref + 1

    if lags is None:
        m = 1 << (n_rx + n_ref - 1).bit_length()
        corr = np.fft.ifft(np.fft.fft(rx.samples, m) * _ref_spectrum(tx_ref, m))
        return MatchedFilterOutput(np.abs(corr[:n_valid]), 0, rx.sample_rate_hz)

    lo, hi = max(0, int(lags[0])), min(n_valid, int(lags[1]))
    if hi - lo < 3:
        raise BoundaryError(f"lag window [{lags[0]}, {lags[1]}) leaves < 3 valid lags")
    metric = kernels.xcorr_mag(rx.samples, tx_ref.samples, lo, hi)
    return MatchedFilterOutput(np.asarray(metric), -lo, rx.sample_rate_hz)


def coarse_peak(mf: MatchedFilterOutput, search: tuple[int, int] | None = None) -> int:
    """Index of the largest metric value; ties go to the lowest index.

    ``search`` limits the scan to metric indices ``[lo, hi)``. A peak on the
    edge of the metric cannot be refined and raises :class:`BoundaryError`,
    as does a gated peak that is not a local maximum.
    """
    m = mf.metric
    if m.size == 0:
        raise ParameterDomainError("empty matched-filter output")
    lo, hi = (0, m.size) if search is None else (max(0, search[0]), min(m.size, search[1]))
    if hi <= lo:
        raise ParameterDomainError("empty search range")
    n = int(kernels.argmax_range(m, lo, hi))
    if n == 0 or n == m.size - 1:
        raise BoundaryError(f"peak at metric edge (index {n}); capture mis-gated")
    if search is not None and (m[n - 1] > m[n] or m[n + 1] > m[n]):
        raise BoundaryError(f"peak at search-gate edge (index {n})")
    return n


def qls_refine(mf: MatchedFilterOutput, n_max: int) -> float:
    """Delay at the vertex of the parabola through the peak and its neighbours."""
    m = mf.metric
    if not 0 < n_max < m.size - 1:
        raise BoundaryError("QLS needs a neighbour on both sides of the peak")
    frac = kernels.qls_offset(float(m[n_max - 1]), float(m[n_max]), float(m[n_max + 1]))
    if math.isnan(frac):
        raise FlatPeakError(f"zero curvature at index {n_max}")
    return (mf.lag_of(n_max) + frac) * mf.sample_period_s


def correct_bias(tau_hat: float, lut: BiasLut, sample_period_s: float) -> float:
    return tau_hat - float(lut.lookup(tau_hat / sample_period_s))


def estimate_delay(rx: SampledSignal, tx_ref: SampledSignal, lut: BiasLut | None = None,
                   expected_lag: int | None = None, half_width: int = 2) -> DelayEstimate:
    """Coarse peak search followed by QLS refinement and optional LUT correction.

    When ``expected_lag`` is given only lags within ``half_width`` of it are
    searched, which rejects the neighbouring lobes of a two-tone response.
    """
    if expected_lag is None:
        mf = matched_filter(rx, tx_ref)
        n = coarse_peak(mf)
    else:
        lo, hi = expected_lag - half_width - 1, expected_lag + half_width + 2
        mf = matched_filter(rx, tx_ref, (lo, hi))
        n = coarse_peak(mf, (1, mf.metric.size - 1))
    tau = qls_refine(mf, n)
    corrected = tau if lut is None else correct_bias(tau, lut, rx.sample_period_s)
    return DelayEstimate(mf.lag_of(n), tau, corrected, float(mf.metric[n]))


def gate_half_width(spec: WaveformSpec) -> int:
    """Largest tracking half-width (samples) that excludes two-tone sidelobes."""
    if spec.bandwidth_hz <= 0:
        return 2
    lobe = spec.sample_rate_hz / spec.bandwidth_hz
    return max(1, int(math.ceil(lobe / 2.0)) - 1)


def noiseless_bias(spec: WaveformSpec, fractions, guard: int = DEFAULT_GUARD_SAMPLES,
                   lut: BiasLut | None = None) -> np.ndarray:
    """QLS error (seconds) for noiseless pulses delayed by ``guard + f`` samples.

    With a LUT the corrected error is returned instead.
    """
    tx = synthesize(spec)
    ts = spec.sample_period_s
    window = len(tx) + 2 * guard
    hw = gate_half_width(spec)
    out = np.empty(len(fractions))
    for i, f in enumerate(fractions):
        true = (guard + float(f)) * ts
        rx = propagate(tx, ChannelModel(true, math.inf), 0.0, window)
        est = estimate_delay(rx, tx, lut, expected_lag=guard + int(round(f)),
                             half_width=hw)
        out[i] = est.corrected_delay_s - true
    return out


def build_bias_lut(spec: WaveformSpec, bin_count: int = DEFAULT_LUT_BINS) -> BiasLut:
    """Tabulate the noiseless QLS bias over one sample interval.

    The bias is measured at uniformly spaced true fractional delays and then
    re-keyed by the fractional delay the estimator would report, so that a
    runtime lookup needs no iteration.
    """
    if bin_count < 64:
        raise ParameterDomainError("bin_count must be >= 64")
    ts = spec.sample_period_s
    f_true = np.arange(bin_count) / bin_count
    bias = noiseless_bias(spec, f_true)
    f_est = f_true + bias / ts
    if np.any(np.diff(f_est) <= 0):
        raise ParameterDomainError("QLS bias too steep to re-key by estimated delay")
    f_est = np.mod(f_est, 1.0)
    order = np.argsort(f_est)
    grid = np.arange(bin_count) / bin_count
    rekeyed = np.interp(grid, f_est[order], bias[order], period=1.0)
    return BiasLut(spec, grid, rekeyed)


def estimate_snr(pulse: SampledSignal, noise_only: SampledSignal) -> float:
    """RMS-power SNR estimate (dB) from a pulse capture and a quiet capture."""
    if len(pulse) != len(noise_only):
        raise ParameterDomainError("pulse and noise captures must have equal length")
    p_s = math.sqrt(float(np.mean(np.abs(pulse.samples) ** 2)) / 50.0)
    p_n = math.sqrt(float(np.mean(np.abs(noise_only.samples) ** 2)) / 50.0)
    if p_n == 0.0:
        raise ParameterDomainError("noise power is zero; SNR undefined")
    return 10.0 * math.log10((p_s / p_n) ** 2)


def _spec_to_dict(spec: WaveformSpec) -> dict:
    d = asdict(spec)
    d["kind"] = spec.kind.value
    return d


def save_lut(lut: BiasLut, path) -> None:
    lines = [
        f"# picosync bias-lut v{LUT_FORMAT_VERSION}",
        "# waveform " + json.dumps(_spec_to_dict(lut.waveform), sort_keys=True),
        "# columns: fractional_delay bias_s",
    ]
    lines += [f"{f:.17e} {b:.17e}" for f, b in zip(lut.fractional_delay, lut.bias_s)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_lut(path) -> BiasLut:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("# picosync bias-lut v"):
        raise ParameterDomainError(f"{path}: not a bias LUT file")
    version = int(text[0].rsplit("v", 1)[1])
    if version != LUT_FORMAT_VERSION:
        raise ParameterDomainError(f"{path}: unsupported LUT version {version}")
    spec = WaveformSpec(**json.loads(text[1].split(" ", 2)[2]))
    rows = np.array([[float(v) for v in ln.split()] for ln in text[3:] if ln.strip()])
    return BiasLut(spec, rows[:, 0], rows[:, 1])
