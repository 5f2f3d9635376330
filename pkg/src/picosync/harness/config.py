"""Experiment configuration and its validation."""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..channel import ChannelModel
from ..clock import ClockState
from ..errors import ConfigValidationError, ParameterDomainError
from ..twtt import EpochSchedule
from ..waveform import WaveformKind, WaveformSpec

__all__ = [
    "ExperimentKind",
    "ClockPair",
    "ExperimentConfig",
    "WIRELESS_JITTER_S",
    "default_config",
    "load_config",
    "config_from_mapping",
]

MIN_TRIALS = 30
# Per-timestamp jitter on node n that lifts the offset-error floor to ~10 ps.
WIRELESS_JITTER_S = 14e-12


class ExperimentKind(str, enum.Enum):
    SNR_SWEEP = "snr-sweep"
    TONE_SEP_SWEEP = "tone-sep-sweep"
    BIAS_CURVE = "bias-curve"
    CAMPAIGN = "campaign"


@dataclass(frozen=True)
class ClockPair:
    node_0: ClockState = ClockState()
    node_n: ClockState = ClockState(offset_s=5e-9, rng_seed=1)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: ExperimentKind = ExperimentKind.SNR_SWEEP
    waveform: WaveformSpec = WaveformSpec()
    snr_points_db: tuple = tuple(float(s) for s in range(6, 37, 3))
    tone_sep_points_hz: tuple = (10e6, 20e6, 30e6, 40e6, 50e6)
    trials_per_point: int = 1000
    channel: ChannelModel = ChannelModel(propagation_delay_s=3e-9, snr_db=30.0)
    clocks: ClockPair = ClockPair()
    schedule: EpochSchedule = EpochSchedule()
    seed: int = 0
    output_path: str = ""
    epochs: int = 100
    lut_bins: int = 1024
    # spread of node n's true offset across trials; None means one sample
    offset_dither_s: float | None = None
    lut_cache_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "experiment", ExperimentKind(self.experiment))

    def validate(self) -> "ExperimentConfig":
        problems = []
        try:
            self.waveform.validate()
        except ParameterDomainError as exc:
            problems.append(("waveform", str(exc)))
        stats = self.experiment in (ExperimentKind.SNR_SWEEP, ExperimentKind.TONE_SEP_SWEEP)
        if stats and self.trials_per_point < MIN_TRIALS:
            problems.append(("trials_per_point", f"must be >= {MIN_TRIALS}"))
        if self.experiment is ExperimentKind.SNR_SWEEP:
            if not self.snr_points_db:
                problems.append(("snr_points_db", "must not be empty"))
            if any(math.isnan(s) for s in self.snr_points_db):
                problems.append(("snr_points_db", "NaN not allowed"))
        if self.experiment is ExperimentKind.TONE_SEP_SWEEP:
            if not self.tone_sep_points_hz:
                problems.append(("tone_sep_points_hz", "must not be empty"))
            bad = [b for b in self.tone_sep_points_hz
                   if not 0 < b < self.waveform.sample_rate_hz]
            if bad:
                problems.append(("tone_sep_points_hz", f"outside (0, fs): {bad}"))
        if self.experiment is ExperimentKind.CAMPAIGN and self.epochs < 1:
            problems.append(("epochs", "must be >= 1"))
        if self.lut_bins < 64:
            problems.append(("lut_bins", "must be >= 64"))
        if not self.clocks.node_0.is_reference:
            problems.append(("clocks.node_0", "reference node needs zero offset and drift"))
        if not self.channel.symmetric:
            problems.append(("channel.symmetric", "asymmetric links are not supported"))
        if self.offset_dither_s is not None and not self.offset_dither_s >= 0:
            problems.append(("offset_dither_s", "must be >= 0"))
        limit = self.schedule.guard_samples * self.waveform.sample_period_s / 2
        if abs(self.clocks.node_n.offset_s) + self.channel.propagation_delay_s > limit:
            problems.append(("clocks.node_n.offset_s",
                             f"offset plus delay must stay within {limit:.3e} s of the gate"))
        if problems:
            raise ConfigValidationError(problems)
        return self

    @property
    def dither_s(self) -> float:
        if self.offset_dither_s is None:
            return self.waveform.sample_period_s
        return self.offset_dither_s


def default_config(experiment="snr-sweep", preset: str = "cabled", **overrides) -> ExperimentConfig:
    """Baseline defaults; ``preset='wireless'`` adds node-n timestamp jitter."""
    cfg = ExperimentConfig(experiment=experiment)
    if preset == "wireless":
        clocks = ClockPair(cfg.clocks.node_0,
                           dataclasses.replace(cfg.clocks.node_n, jitter_std_s=WIRELESS_JITTER_S))
        cfg = dataclasses.replace(cfg, clocks=clocks)
    elif preset != "cabled":
        raise ConfigValidationError([("preset", f"unknown preset {preset!r}")])
    return dataclasses.replace(cfg, **overrides)


# -- loading ---------------------------------------------------------------

def _build(cls, data, path, problems, convert=None):
    if not isinstance(data, dict):
        problems.append((path, "expected a mapping"))
        return None
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(names))
    for k in unknown:
        problems.append((f"{path}.{k}", "unknown field"))
    kwargs = {}
    for k, v in data.items():
        if k not in names:
            continue
        try:
            kwargs[k] = convert(k, v) if convert else v
        except (TypeError, ValueError) as exc:
            problems.append((f"{path}.{k}", str(exc)))
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        problems.append((path, str(exc)))
        return None


def _num(k, v):
    if isinstance(v, bool):
        raise ValueError("expected a number")
    return float(v)


def _waveform_field(k, v):
    if k == "kind":
        return WaveformKind(v)
    return _num(k, v)


def _clock_field(k, v):
    return int(v) if k == "rng_seed" else _num(k, v)


def _channel_field(k, v):
    if k == "symmetric":
        return bool(v)
    if k == "rng_seed":
        return int(v)
    return _num(k, v)


def _schedule_field(k, v):
    return int(v) if k in ("pulse_count", "guard_samples") else _num(k, v)


def config_from_mapping(data: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Build a config from a parsed mapping; nested sections may be partial."""
    base = base or ExperimentConfig()
    problems = []
    if not isinstance(data, dict):
        raise ConfigValidationError([("<root>", "expected a mapping")])
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for k in sorted(set(data) - known):
        problems.append((k, "unknown field"))

    kw = {}

    def section(name, cls, conv):
        if name in data:
            merged = {**dataclasses.asdict(getattr(base, name)), **(data[name] or {})} \
                if isinstance(data[name], dict) else data[name]
            obj = _build(cls, merged, name, problems, conv)
            if obj is not None:
                kw[name] = obj

    section("waveform", WaveformSpec, _waveform_field)
    section("channel", ChannelModel, _channel_field)
    section("schedule", EpochSchedule, _schedule_field)
    if "clocks" in data:
        c = data["clocks"] or {}
        nodes = {}
        for node in ("node_0", "node_n"):
            if node in c:
                merged = {**dataclasses.asdict(getattr(base.clocks, node)), **(c[node] or {})}
                obj = _build(ClockState, merged, f"clocks.{node}", problems, _clock_field)
                if obj is not None:
                    nodes[node] = obj
        for k in sorted(set(c) - {"node_0", "node_n"}):
            problems.append((f"clocks.{k}", "unknown field"))
        kw["clocks"] = ClockPair(nodes.get("node_0", base.clocks.node_0),
                                 nodes.get("node_n", base.clocks.node_n))

    scalars = {
        "experiment": ExperimentKind,
        "trials_per_point": int,
        "seed": int,
        "output_path": str,
        "epochs": int,
        "lut_bins": int,
        "offset_dither_s": lambda v: None if v is None else float(v),
        "lut_cache_dir": lambda v: None if v is None else str(v),
        "snr_points_db": lambda v: tuple(float(x) for x in v),
        "tone_sep_points_hz": lambda v: tuple(float(x) for x in v),
    }
    for k, conv in scalars.items():
        if k in data:
            try:
                kw[k] = conv(data[k])
            except (TypeError, ValueError) as exc:
                problems.append((k, str(exc)))
    if problems:
        raise ConfigValidationError(problems)
    return dataclasses.replace(base, **kw)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read a YAML (or JSON) config file; numbers may be written as ``40e6``."""
    text = Path(path).read_text()
    data = yaml.safe_load(text) or {}
    return config_from_mapping(data, base)
