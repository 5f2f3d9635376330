import math

import numpy as np
from hypothesis import given, settings, strategies as st

from picosync.analysis import crlb_std
from picosync.clock import ClockState, local_from_true, true_from_local
from picosync.kernels import qls_offset
from picosync.twtt import TimestampQuadruple, compute_delay, compute_offset

times = st.floats(-1e3, 1e3, allow_nan=False)
small = st.floats(-1e-6, 1e-6, allow_nan=False)


@given(times, times, times, times)
def test_offset_plus_delay_is_forward_trip(a, b, c, d):
    q = TimestampQuadruple(a, b, c, d)
    lhs = compute_offset(q) + compute_delay(q, noise_floor_s=math.inf)
    scale = max(abs(a), abs(b), abs(c), abs(d), 1e-30)
    assert abs(lhs - (b - a)) <= 1e-12 * scale


@given(small, st.floats(0, 1e-6), st.floats(0, 1e-3))
def test_offset_invariant_to_delay(offset, tau, proc):
    def quad(t):
        t_txn = 0.0
        t_rx0 = t + offset
        t_tx0 = t_rx0 + proc
        return TimestampQuadruple(t_txn, t_rx0, t_tx0, t_tx0 + t - offset)

    assert math.isclose(compute_offset(quad(tau)), compute_offset(quad(0.0)),
                        rel_tol=1e-9, abs_tol=1e-18)


@given(small, st.floats(-1e-6, 1e-6), st.floats(0, 1e4))
def test_clock_round_trip(offset, ffe, t):
    c = ClockState(offset_s=offset, frac_freq_error=ffe)
    back = true_from_local(c, local_from_true(c, t, None))
    assert abs(back - t) <= 4e-16 * max(t, 1.0)


@given(st.floats(1e10, 1e18), st.floats(1.0, 1e10), st.floats(1.01, 10))
def test_crlb_strictly_decreasing(z, e, k):
    assert crlb_std(z * k, e) < crlb_std(z, e)
    assert crlb_std(z, e * k) < crlb_std(z, e)


@given(st.floats(-0.49, 0.49))
@settings(max_examples=50)
def test_qls_recovers_parabola_vertex(v):
    x = np.array([-1.0, 0.0, 1.0])
    y = 5.0 - (x - v) ** 2
    assert math.isclose(qls_offset(*y), v, abs_tol=1e-12)
