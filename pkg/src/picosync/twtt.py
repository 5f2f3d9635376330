"""Two-way time transfer between node n and the reference node 0.

Sign convention: a clock reads ``true + delta``; the offset estimate is
``Delta_0n = delta_0 - delta_n``. With that convention the half-sum of the
two one-way timestamp differences cancels the propagation delay and the
half-difference cancels the clock offset.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelModel, capture_noise, noise_power_for, propagate
from .clock import (
    ClockState,
    CorrectionRecord,
    apply_correction,
    jitter_draw,
    true_from_local,
    true_offset,
)
from .errors import (
    BoundaryError,
    ExchangeError,
    FlatPeakError,
    ParameterDomainError,
    WindowOverrunError,
)
from .estimator import (
    DEFAULT_GUARD_SAMPLES,
    BiasLut,
    DelayEstimate,
    estimate_delay,
    estimate_snr,
    gate_half_width,
)
from .waveform import SampledSignal, WaveformSpec, synthesize

__all__ = [
    "TimestampQuadruple",
    "ExchangeResult",
    "EpochSchedule",
    "TraceRow",
    "AsymmetryWarning",
    "compute_offset",
    "compute_delay",
    "run_exchange",
    "run_campaign",
    "trace_rows",
]


class AsymmetryWarning(UserWarning):
    """Two-way delay came out negative beyond the estimator noise."""


@dataclass(frozen=True)
class TimestampQuadruple:
    t_txn_s: float
    t_rx0_s: float
    t_tx0_s: float
    t_rxn_s: float

    def as_tuple(self):
        return (self.t_txn_s, self.t_rx0_s, self.t_tx0_s, self.t_rxn_s)


@dataclass(frozen=True)
class EpochSchedule:
    """Timing of one synchronisation exchange and of the resync cadence.

    ``proc_delay_s`` is the gap node 0 leaves between the expected pulse
    arrival and its reply. ``guard_samples`` pads the receive gate on each
    side of the expected pulse position.
    """

    sync_epoch_s: float = 50.01e-3
    resync_interval_s: float = 100e-3
    proc_delay_s: float = 50e-3
    pulse_count: int = 1
    guard_samples: int = DEFAULT_GUARD_SAMPLES

    def __post_init__(self):
        if self.resync_interval_s < self.sync_epoch_s:
            raise ParameterDomainError("resync_interval_s must be >= sync_epoch_s")
        if self.proc_delay_s < 0:
            raise ParameterDomainError("proc_delay_s must be >= 0")
        if self.pulse_count != 1:
            raise ParameterDomainError("only single-pulse exchanges are supported")
        if self.guard_samples < 4:
            raise ParameterDomainError("guard_samples must be >= 4")


@dataclass(frozen=True)
class ExchangeResult:
    quad: TimestampQuadruple
    offset_estimate_s: float
    delay_estimate_s: float
    snr_measured_db: tuple
    forward: DelayEstimate
    reverse: DelayEstimate
    # simulation ground truth
    true_offset_s: float
    true_delay_s: float

    @property
    def offset_error_s(self) -> float:
        return self.offset_estimate_s - self.true_offset_s

    @property
    def delay_error_s(self) -> float:
        return self.delay_estimate_s - self.true_delay_s


def compute_offset(quad: TimestampQuadruple) -> float:
    """Clock offset ``delta_0 - delta_n``; independent of the link delay."""
    return ((quad.t_rx0_s - quad.t_txn_s) + (quad.t_tx0_s - quad.t_rxn_s)) / 2.0


def compute_delay(quad: TimestampQuadruple, noise_floor_s: float = 1e-9) -> float:
    """One-way propagation delay on a symmetric link; independent of offset."""
    tau = ((quad.t_rx0_s - quad.t_txn_s) - (quad.t_tx0_s - quad.t_rxn_s)) / 2.0
    if tau < -noise_floor_s:
        warnings.warn(
            f"negative two-way delay {tau:.3e} s; link may be asymmetric",
            AsymmetryWarning,
            stacklevel=2,
        )
    return tau


@functools.lru_cache(maxsize=32)
def _reference_pulse(spec: WaveformSpec) -> SampledSignal:
    return synthesize(spec)


def _event_true_time(state: ClockState, t_local: float, draw_index: int) -> float:
    # hardware fires when the (jittered) local clock reads t_local
    return true_from_local(state, t_local - jitter_draw(state, draw_index))


def _interior_segment(rx: SampledSignal, tx: SampledSignal, lag: int) -> SampledSignal:
    e = tx.edge_samples
    lo, hi = lag + e, lag + len(tx) - e
    return SampledSignal(rx.samples[lo:hi], rx.sample_rate_hz)


def run_exchange(
    node_n: ClockState,
    node_0: ClockState,
    ch: ChannelModel,
    spec: WaveformSpec,
    lut: BiasLut | None,
    sched: EpochSchedule,
    seed: int,
    *,
    t_start_local: float = 0.0,
    prior_offset_s: float = 0.0,
    prior_delay_s: float = 0.0,
    track: bool = False,
) -> ExchangeResult:
    """Simulate one pulse out from node n and one reply from node 0.

    Both receivers open a gate placed so the pulse is expected
    ``guard_samples`` in, using the prior offset and delay. Timestamps are
    the gate's local open time plus the bias-corrected in-gate delay. With
    ``track=True`` the peak search is confined to the expected lobe.

    Raises :class:`ExchangeError` when the pulse misses the gate or the
    estimator cannot refine the peak.
    """
    if not ch.symmetric:
        raise ParameterDomainError("run_exchange needs a symmetric channel")
    if lut is not None and lut.waveform != spec:
        raise ParameterDomainError("bias LUT was built for a different waveform")

    tx = _reference_pulse(spec)
    ts = spec.sample_period_s
    guard = sched.guard_samples
    window = len(tx) + 2 * guard
    lead = guard * ts
    expected = guard if track else None
    hw = gate_half_width(spec)

    ss = np.random.SeedSequence([ch.rng_seed & 0xFFFFFFFFFFFFFFFF, seed])
    s_fwd, s_rev, q_fwd, q_rev = (int(v) for v in ss.generate_state(4, dtype=np.uint64))
    draw = 4 * seed

    try:
        # node n -> node 0
        t_txn = t_start_local
        t1 = _event_true_time(node_n, t_txn, draw)
        g0 = t_txn + prior_delay_s + prior_offset_s - lead
        g0_true = _event_true_time(node_0, g0, draw + 1)
        rx0 = propagate(tx.with_start(t1), replace(ch, rng_seed=s_fwd), g0_true, window)
        est0 = estimate_delay(rx0, tx, lut, expected, hw)
        t_rx0 = g0 + est0.corrected_delay_s

        # node 0 -> node n
        t_tx0 = g0 + lead + sched.proc_delay_s
        t3 = _event_true_time(node_0, t_tx0, draw + 2)
        gn = t_tx0 - prior_offset_s + prior_delay_s - lead
        gn_true = _event_true_time(node_n, gn, draw + 3)
        rxn = propagate(tx.with_start(t3), replace(ch, rng_seed=s_rev), gn_true, window)
        estn = estimate_delay(rxn, tx, lut, expected, hw)
        t_rxn = gn + estn.corrected_delay_s
    except (WindowOverrunError, BoundaryError, FlatPeakError) as exc:
        raise ExchangeError(f"exchange aborted: {exc}") from exc

    quad = TimestampQuadruple(t_txn, t_rx0, t_tx0, t_rxn)
    if ch.noiseless:
        snr = (math.inf, math.inf)
    else:
        p_n = noise_power_for(tx, ch.snr_db)
        snr = tuple(
            estimate_snr(seg, capture_noise(len(seg), p_n, spec.sample_rate_hz, q))
            for seg, q in (
                (_interior_segment(rx0, tx, est0.coarse_index), q_fwd),
                (_interior_segment(rxn, tx, estn.coarse_index), q_rev),
            )
        )

    t4 = t3 + ch.propagation_delay_s
    truth = 0.5 * (true_offset(node_0, t1 + ch.propagation_delay_s) + true_offset(node_0, t3)) \
        - 0.5 * (true_offset(node_n, t1) + true_offset(node_n, t4))
    return ExchangeResult(
        quad=quad,
        offset_estimate_s=compute_offset(quad),
        delay_estimate_s=compute_delay(quad),
        snr_measured_db=snr,
        forward=est0,
        reverse=estn,
        true_offset_s=truth,
        true_delay_s=ch.propagation_delay_s,
    )


def run_campaign(nodes, ch: ChannelModel, spec: WaveformSpec, sched: EpochSchedule,
                 epochs: int, seed: int, lut: BiasLut | None = None,
                 track: bool = True,
                 coarse_prior: tuple[float, float] | None = None) -> list[CorrectionRecord]:
    """Resynchronise node n against node 0 once per resync interval.

    ``nodes`` is ``(node_0, node_n)``. After every successful exchange node
    n's clock is stepped by the offset estimate. The first exchange acquires
    with a full search unless ``coarse_prior`` supplies an (offset, delay)
    pair to track around; later ones track around the previous estimate
    when ``track`` is set. Failed exchanges are recorded and leave the clock
    untouched.
    """
    if epochs < 1:
        raise ParameterDomainError("epochs must be >= 1")
    node_0, node_n = nodes
    records = []
    prior_offset, prior_delay = coarse_prior or (0.0, 0.0)
    locked = coarse_prior is not None
    for k in range(epochs):
        t_local = k * sched.resync_interval_s
        epoch_seed = int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint64)[0])
        try:
            res = run_exchange(
                node_n, node_0, ch, spec, lut, sched, epoch_seed,
                t_start_local=t_local, prior_offset_s=prior_offset,
                prior_delay_s=prior_delay,
                track=track and locked,
            )
        except ExchangeError:
            t_now = true_from_local(node_n, t_local)
            off = true_offset(node_n, t_now)
            records.append(CorrectionRecord(k, 0.0, off, off, failed=True))
            locked = False
            continue
        # correction lands when the reply has been timestamped
        t_corr = true_from_local(node_n, res.quad.t_rxn_s)
        pre = true_offset(node_n, t_corr)
        node_n = apply_correction(node_n, -res.offset_estimate_s)
        post = true_offset(node_n, t_corr)
        records.append(CorrectionRecord(k, res.offset_estimate_s, post, pre, exchange=res))
        prior_offset, prior_delay = 0.0, res.delay_estimate_s
        locked = True
    return records


@dataclass(frozen=True)
class TraceRow:
    """Flat export of one exchange; both two-way combinations are kept."""

    epoch: int
    failed: int
    t_txn_s: float
    t_rx0_s: float
    t_tx0_s: float
    t_rxn_s: float
    half_sum_s: float
    half_difference_s: float
    offset_estimate_s: float
    delay_estimate_s: float
    true_offset_s: float
    true_delay_s: float
    snr_forward_db: float
    snr_reverse_db: float
    applied_offset_s: float
    pre_correction_offset_s: float
    residual_true_offset_s: float


def trace_rows(records) -> list[TraceRow]:
    nan = math.nan
    rows = []
    for r in records:
        ex = r.exchange
        if ex is None:
            rows.append(TraceRow(r.epoch_index, 1, *([nan] * 12), r.applied_offset_s,
                                 r.pre_correction_offset_s, r.residual_true_offset_s))
            continue
        q = ex.quad
        a, b = q.t_rx0_s - q.t_txn_s, q.t_tx0_s - q.t_rxn_s
        rows.append(TraceRow(
            r.epoch_index, 0, *q.as_tuple(), (a + b) / 2, (a - b) / 2,
            ex.offset_estimate_s, ex.delay_estimate_s, ex.true_offset_s, ex.true_delay_s,
            float(ex.snr_measured_db[0]), float(ex.snr_measured_db[1]),
            r.applied_offset_s, r.pre_correction_offset_s, r.residual_true_offset_s,
        ))
    return rows
