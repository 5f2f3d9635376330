import numpy as np
import pytest

from picosync.errors import ParameterDomainError
from picosync.waveform import (
    SampledSignal,
    WaveformKind,
    WaveformSpec,
    apply_envelope,
    sample_count,
    synthesize,
)


def test_default_two_tone_length():
    assert len(synthesize(WaveformSpec())) == 2000


def test_kind_accepts_strings():
    assert WaveformSpec(kind="lfm").kind is WaveformKind.LFM
    with pytest.raises(ValueError):
        WaveformSpec(kind="square")


@pytest.mark.parametrize("kind", list(WaveformKind))
def test_interior_rms_equals_amplitude(kind):
    s = synthesize(WaveformSpec(kind=kind, amplitude=0.5))
    rms = np.sqrt(np.mean(np.abs(s.interior) ** 2))
    assert rms == pytest.approx(0.5, rel=2e-3)


def test_two_tone_is_scaled_cosine():
    spec = WaveformSpec(rise_fall_s=0)
    s = synthesize(spec)
    t = s.times()
    np.testing.assert_allclose(s.samples, np.sqrt(2) * np.cos(np.pi * 40e6 * t), atol=1e-12)


def test_two_tone_spectrum_has_two_lines():
    s = synthesize(WaveformSpec(rise_fall_s=0))
    spec = np.abs(np.fft.fftshift(np.fft.fft(s.samples)))
    f = np.fft.fftshift(np.fft.fftfreq(len(s), 1 / 200e6))
    top = sorted(f[np.argsort(spec)[-2:]])
    assert top == pytest.approx([-20e6, 20e6])


def test_zero_bandwidth_is_single_line_at_dc():
    s = synthesize(WaveformSpec(bandwidth_hz=0, rise_fall_s=0))
    mag = np.abs(np.fft.fft(s.samples))
    assert np.argmax(mag) == 0
    assert np.sum(mag[1:]) < 1e-6 * mag[0]


def test_lfm_sweeps_band():
    spec = WaveformSpec(kind="lfm", rise_fall_s=0)
    s = synthesize(spec)
    inst = np.diff(np.unwrap(np.angle(s.samples))) * spec.sample_rate_hz / (2 * np.pi)
    assert inst[0] == pytest.approx(-20e6, abs=0.1e6)
    assert inst[-1] == pytest.approx(20e6, abs=0.1e6)
    assert np.all(np.diff(inst) > 0)


def test_envelope_zero_is_identity():
    s = synthesize(WaveformSpec(rise_fall_s=0))
    assert apply_envelope(s, 0.0) is s


def test_envelope_ramp_rises_then_mirrors():
    raw = SampledSignal(np.ones(2000), 200e6)
    s = apply_envelope(raw, 50e-9)
    mag = np.abs(s.samples)
    assert np.all(np.diff(mag[:10]) > 0)
    assert mag[0] == 0.0
    np.testing.assert_allclose(mag[-10:], mag[1:11][::-1])
    assert s.edge_samples == 10


def test_envelope_too_long():
    raw = SampledSignal(np.ones(100), 200e6)
    with pytest.raises(ParameterDomainError):
        apply_envelope(raw, 300e-9)


@pytest.mark.parametrize("field, value", [
    ("bandwidth_hz", 250e6), ("bandwidth_hz", -1.0), ("sample_rate_hz", 0.0),
    ("pulse_duration_s", 0.0), ("rise_fall_s", 6e-6), ("amplitude", 0.0),
])
def test_invalid_spec_rejected(field, value):
    with pytest.raises(ParameterDomainError):
        synthesize(WaveformSpec(**{field: value}))


def test_samples_are_read_only():
    s = synthesize(WaveformSpec())
    with pytest.raises(ValueError):
        s.samples[0] = 0


def test_sample_count_rounds():
    assert sample_count(10e-6, 200e6) == 2000
    assert sample_count(50e-9, 200e6) == 10
