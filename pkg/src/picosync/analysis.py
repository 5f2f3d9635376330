"""Cramer-Rao bound machinery for single-pulse delay estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError
from .waveform import SampledSignal, WaveformKind

__all__ = [
    "CrlbPoint",
    "msb_closed_form",
    "msb_numeric",
    "es_n0",
    "crlb_std",
    "crlb_point",
]


@dataclass(frozen=True)
class CrlbPoint:
    zeta_sq: float
    es_n0: float
    var_bound_s2: float
    std_bound_s: float


def msb_closed_form(kind, bw_hz: float) -> float:
    """Mean-squared bandwidth (rad^2/s^2) of an ideal two-tone or LFM pulse.

    Two-tone: ``(pi BW)^2``. LFM (flat spectrum over BW): ``(pi BW)^2 / 3``.
    """
    if bw_hz < 0:
        raise ParameterDomainError("bandwidth must be >= 0")
    kind = WaveformKind(kind)
    z = (math.pi * bw_hz) ** 2
    return z if kind is WaveformKind.TWO_TONE else z / 3.0


def msb_numeric(signal: SampledSignal, pad_factor: int = 8) -> float:
    """Second moment of the unit-energy PSD, integrated over the sampled band."""
    x = signal.samples
    if not np.any(x):
        raise ParameterDomainError("signal energy is zero")
    m = 1 << (pad_factor * x.size - 1).bit_length()
    psd = np.abs(np.fft.fft(x, m)) ** 2
    f = np.fft.fftfreq(m, d=signal.sample_period_s)
    # Nyquist bin sits at -fs/2 and has equal weight either way
    return float(np.sum((2 * np.pi * f) ** 2 * psd) / np.sum(psd))


def es_n0(tau_p_s: float, snr_db: float, nbw_hz: float) -> float:
    """Energy-to-noise-density ratio ``tau_p * SNR * NBW`` (linear)."""
    if not (tau_p_s > 0 and nbw_hz > 0):
        raise ParameterDomainError("pulse duration and noise bandwidth must be > 0")
    return tau_p_s * 10.0 ** (snr_db / 10.0) * nbw_hz


def crlb_std(zeta_sq: float, es_n0: float) -> float:
    """Lower bound on the delay-error standard deviation, seconds."""
    if not (zeta_sq > 0 and es_n0 > 0):
        raise ParameterDomainError("zeta_sq and es_n0 must be > 0")
    return math.sqrt(1.0 / (2.0 * zeta_sq * es_n0))


def crlb_point(zeta_sq: float, es_n0_value: float) -> CrlbPoint:
    std = crlb_std(zeta_sq, es_n0_value)
    return CrlbPoint(zeta_sq, es_n0_value, std * std, std)
