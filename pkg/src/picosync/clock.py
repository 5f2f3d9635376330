"""Local clock model: true time plus a quasi-static offset with drift and jitter.

A node reads ``T_n(t) = t + offset + ffe * t + jitter``; drift accumulates
from the simulation origin ``t = 0``. Node 0 is the reference and carries no
offset or drift.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError

__all__ = [
    "ClockState",
    "CorrectionRecord",
    "reference_clock",
    "jitter_draw",
    "local_from_true",
    "true_from_local",
    "apply_correction",
    "true_offset",
]

EPOCH_ORIGIN_S = 0.0


@dataclass(frozen=True)
class ClockState:
    offset_s: float = 0.0
    frac_freq_error: float = 0.0
    jitter_std_s: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.jitter_std_s >= 0:
            raise ParameterDomainError("jitter_std_s must be >= 0")

    @property
    def is_reference(self) -> bool:
        return self.offset_s == 0.0 and self.frac_freq_error == 0.0


@dataclass(frozen=True)
class CorrectionRecord:
    """One resynchronisation epoch of a campaign.

    ``residual_true_offset_s`` is node n's true time error right after the
    correction; ``pre_correction_offset_s`` is the same quantity just before
    it. ``exchange`` is None when the exchange failed and no correction was
    applied.
    """

    epoch_index: int
    applied_offset_s: float
    residual_true_offset_s: float
    pre_correction_offset_s: float = float("nan")
    failed: bool = False
    exchange: object = None


def reference_clock(jitter_std_s: float = 0.0, rng_seed: int = 0) -> ClockState:
    return ClockState(0.0, 0.0, jitter_std_s, rng_seed)


def jitter_draw(state: ClockState, draw_index: int) -> float:
    """Jitter of one timestamp read; reproducible per (seed, draw index)."""
    if state.jitter_std_s == 0.0:
        return 0.0
    rng = np.random.default_rng([state.rng_seed & 0xFFFFFFFFFFFFFFFF, draw_index])
    return float(rng.normal(0.0, state.jitter_std_s))


def true_offset(state: ClockState, t_true: float) -> float:
    """Jitter-free time error of the clock at ``t_true``."""
    return state.offset_s + state.frac_freq_error * (t_true - EPOCH_ORIGIN_S)


def local_from_true(state: ClockState, t_true: float, draw_index: int | None = 0) -> float:
    """Read the local clock at true time ``t_true``.

    Pass ``draw_index=None`` for the jitter-free reading.
    """
    t = t_true + true_offset(state, t_true)
    if draw_index is not None:
        t += jitter_draw(state, draw_index)
    return t


def true_from_local(state: ClockState, t_local: float) -> float:
    if abs(state.frac_freq_error) >= 1e-3:
        raise ParameterDomainError("|frac_freq_error| must be < 1e-3")
    ffe = state.frac_freq_error
    # t_local = t (1 + ffe) + offset - ffe * origin
    return (t_local - state.offset_s + ffe * EPOCH_ORIGIN_S) / (1.0 + ffe)


def apply_correction(state: ClockState, delta_s: float) -> ClockState:
    """Return a copy of ``state`` with its offset reduced by ``delta_s``."""
    if not np.isfinite(delta_s):
        raise ParameterDomainError("correction must be finite")
    return dataclasses.replace(state, offset_s=state.offset_s - delta_s)
