"""picosync: picosecond two-way time transfer over a simulated RF link.

The chain runs from pulse synthesis through a delaying, noisy channel to a
matched-filter delay estimator, and closes with two-way offset recovery
between a reference node and a follower clock.
"""
from .analysis import crlb_point, crlb_std, es_n0, msb_closed_form, msb_numeric
from .channel import ChannelModel, add_awgn, propagate
from .clock import ClockState, CorrectionRecord, apply_correction, local_from_true, true_from_local
from .errors import (
    BoundaryError,
    ConfigValidationError,
    ExchangeError,
    FlatPeakError,
    ParameterDomainError,
    WindowOverrunError,
)
from .estimator import (
    BiasLut,
    DelayEstimate,
    build_bias_lut,
    estimate_delay,
    estimate_snr,
    load_lut,
    matched_filter,
    save_lut,
)
from .kernels import BACKEND
from .twtt import (
    EpochSchedule,
    ExchangeResult,
    TimestampQuadruple,
    compute_delay,
    compute_offset,
    run_campaign,
    run_exchange,
)
from .waveform import SampledSignal, WaveformKind, WaveformSpec, synthesize

__version__ = "0.1.0"
