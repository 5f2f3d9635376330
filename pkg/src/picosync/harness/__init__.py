"""Experiment harness with Monte Carlo runners and a command-line front end."""
from .config import (
    ClockPair,
    ExperimentConfig,
    ExperimentKind,
    WIRELESS_JITTER_S,
    config_from_mapping,
    default_config,
    load_config,
)
from .experiments import (
    BiasCurveRow,
    SweepRecord,
    crlb_violations,
    get_lut,
    offset_crlb_std,
    run_bias_curve,
    run_campaign_experiment,
    run_experiment,
    run_snr_sweep,
    run_tone_sep_sweep,
)
from .report import emit_report, read_report

__all__ = [
    "ClockPair", "ExperimentConfig", "ExperimentKind", "WIRELESS_JITTER_S",
    "config_from_mapping", "default_config", "load_config",
    "BiasCurveRow", "SweepRecord", "crlb_violations", "get_lut", "offset_crlb_std",
    "run_bias_curve", "run_campaign_experiment", "run_experiment",
    "run_snr_sweep", "run_tone_sep_sweep", "emit_report", "read_report",
]
