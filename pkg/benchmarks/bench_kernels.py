"""Compare the compiled and pure-Python kernel backends.

Run with ``python3 benchmarks/bench_kernels.py``. Reports per-call time
for the lag-windowed correlation at tracking and acquisition widths, and
the end-to-end cost of one two-way exchange under each backend.
"""
from __future__ import annotations

import argparse
import importlib
import os
import subprocess
import sys
import timeit

import numpy as np

from picosync import _pykernels

try:
    from picosync import _ckernels
except ImportError:
    _ckernels = None

EXCHANGE_SNIPPET = """
import timeit
from picosync import kernels
from picosync.channel import ChannelModel
from picosync.clock import ClockState
from picosync.estimator import BiasLut
from picosync.twtt import EpochSchedule, run_exchange
from picosync.waveform import WaveformSpec
spec = WaveformSpec()
lut = BiasLut.zeros(spec, 128)
n, z, ch, sch = ClockState(offset_s=5e-9), ClockState(), ChannelModel(3e-9, 30.0), EpochSchedule()
run_exchange(n, z, ch, spec, lut, sch, 0)
k = [0]
def one():
    k[0] += 1
    run_exchange(n, z, ch, spec, lut, sch, k[0], track=True)
t = min(timeit.repeat(one, number={reps}, repeat=3)) / {reps}
print(kernels.BACKEND, t)
"""


def _per_call(fn, reps):
    return min(timeit.repeat(fn, number=reps, repeat=5)) / reps


def bench_xcorr(reps: int):
    rng = np.random.default_rng(0)
    ref = rng.normal(size=2000) + 1j * rng.normal(size=2000)
    rx = rng.normal(size=2256) + 1j * rng.normal(size=2256)
    rows = []
    for width in (6, 32, 257):
        lo, hi = 128 - width // 2, 128 - width // 2 + width
        times = {"python": _per_call(lambda: _pykernels.xcorr_mag(rx, ref, lo, hi), reps)}
        if _ckernels is not None:
            times["cython"] = _per_call(lambda: _ckernels.xcorr_mag(rx, ref, lo, hi), reps)
        rows.append((width, times))
    return rows


def bench_exchange(reps: int):
    out = {}
    for backend in ("cython", "python"):
        if backend == "cython" and _ckernels is None:
            continue
        env = dict(os.environ)
        if backend == "python":
            env["PICOSYNC_PURE_PYTHON"] = "1"
        else:
            env.pop("PICOSYNC_PURE_PYTHON", None)
        res = subprocess.run([sys.executable, "-c", EXCHANGE_SNIPPET.format(reps=reps)],
                             env=env, capture_output=True, text=True, check=True)
        name, t = res.stdout.split()
        out[name] = float(t)
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--reps", type=int, default=200)
    args = p.parse_args(argv)

    print(f"{'lags':>6} {'python us':>11} {'cython us':>11} {'speedup':>8}")
    for width, t in bench_xcorr(args.reps):
        py = t["python"] * 1e6
        cy = t.get("cython", float("nan")) * 1e6
        print(f"{width:>6} {py:>11.1f} {cy:>11.1f} {py / cy:>8.2f}")

    ex = bench_exchange(max(args.reps // 4, 10))
    print()
    for name, t in ex.items():
        print(f"exchange [{name:>6}]: {t * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
