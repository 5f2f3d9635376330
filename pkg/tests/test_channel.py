import math

import numpy as np
import pytest

from picosync.channel import (
    ChannelModel,
    add_awgn,
    capture_noise,
    interior_power,
    propagate,
)
from picosync.errors import ParameterDomainError, WindowOverrunError
from picosync.estimator import estimate_delay, estimate_snr
from picosync.waveform import SampledSignal, WaveformSpec, synthesize

TX = synthesize(WaveformSpec())
NOISELESS = ChannelModel(0.0, math.inf)


def test_zero_delay_identity():
    rx = propagate(TX, NOISELESS, 0.0, len(TX) + 16)
    np.testing.assert_allclose(rx.samples[: len(TX)], TX.samples, rtol=0, atol=1e-12)
    assert np.all(rx.samples[len(TX):] == 0)


def test_integer_delay_places_pulse():
    ch = ChannelModel(5 * TX.sample_period_s, math.inf)
    rx = propagate(TX, ch, 0.0, len(TX) + 16)
    np.testing.assert_allclose(rx.samples[5 : 5 + len(TX)], TX.samples, atol=1e-12)


def test_fractional_delay_recovered():
    ch = ChannelModel(17.3e-9, math.inf)
    rx = propagate(TX, ch, 0.0, len(TX) + 32)
    est = estimate_delay(rx, TX)
    assert est.coarse_index == 3
    assert est.refined_delay_s == pytest.approx(17.3e-9, abs=100e-12)


def test_window_overrun():
    with pytest.raises(WindowOverrunError):
        propagate(TX, ChannelModel(10e-9, math.inf), 0.0, len(TX))
    with pytest.raises(WindowOverrunError):
        propagate(TX, NOISELESS, 1e-9, len(TX) + 10)


def test_snr_calibration_zero_db():
    x = SampledSignal(np.exp(1j * np.linspace(0, 50, 10_000)), 200e6)
    y = add_awgn(x, 0.0, seed=3)
    noise = y.samples - x.samples
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(interior_power(x), rel=0.05)


def test_awgn_infinite_snr_is_identity():
    assert add_awgn(TX, math.inf, 0) is TX


def test_snr_round_trip_36db():
    rx = propagate(TX, ChannelModel(0.0, 36.0, rng_seed=5), 0.0, len(TX))
    seg = SampledSignal(rx.samples[100:1100], rx.sample_rate_hz)
    p_n = interior_power(TX) / 10 ** 3.6
    quiet = capture_noise(1000, p_n, 200e6, seed=9)
    assert estimate_snr(seg, quiet) == pytest.approx(36.0, abs=0.5)


def test_noise_is_seeded():
    a = propagate(TX, ChannelModel(3e-9, 10.0, rng_seed=1), 0.0, len(TX) + 8)
    b = propagate(TX, ChannelModel(3e-9, 10.0, rng_seed=1), 0.0, len(TX) + 8)
    c = propagate(TX, ChannelModel(3e-9, 10.0, rng_seed=2), 0.0, len(TX) + 8)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_zero_power_rejected():
    with pytest.raises(ParameterDomainError):
        add_awgn(SampledSignal(np.zeros(10), 1.0), 10.0, 0)


def test_negative_delay_rejected():
    with pytest.raises(ParameterDomainError):
        ChannelModel(-1e-9)
