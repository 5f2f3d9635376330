"""NumPy implementations of the kernels in ``_ckernels.pyx``."""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def xcorr_mag(rx, ref, lag_lo, lag_hi):
    n_ref = ref.shape[0]
    frames = sliding_window_view(rx[lag_lo:lag_hi + n_ref - 1], n_ref)
    return np.abs(frames @ np.conj(ref))


def argmax_range(metric, lo, hi):
    return lo + int(np.argmax(metric[lo:hi]))


def qls_offset(a, b, c):
    den = a - 2.0 * b + c
    if den == 0.0:
        return float("nan")
    return 0.5 * (a - c) / den
