"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--seconds 20]

Times each hot kernel on segment-sized inputs, then the whole tracker on
synthetic speech with each backend swapped in.
"""
import argparse
import importlib
import time
from unittest import mock

import numpy as np

from pwvdpitch import _kernels
from pwvdpitch.dsp import analytic_signal, hann_for_duration
from pwvdpitch.pwvd import pwvd, wvd_direct
from pwvdpitch.signal_io import AudioBuffer, synth_speechlike
from pwvdpitch.tracker import track_pitch

pwvd_mod = importlib.import_module("pwvdpitch.pwvd")


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seconds", type=float, default=20.0)
    ap.add_argument("--segments", type=int, default=200)
    args = ap.parse_args()

    backends = {"python": _kernels.python_backend}
    if _kernels.compiled_backend is not None:
        backends["cython"] = _kernels.compiled_backend
    else:
        print("compiled backend not built; timing the numpy fallback only")

    rng = np.random.default_rng(0)
    fs = 800.0
    segs = [analytic_signal(AudioBuffer(rng.standard_normal(152), fs)) for _ in range(args.segments)]
    window = hann_for_duration(0.040, fs)
    lagw = window.lag_weights()
    tfs = [pwvd(z, window) for z in segs[:20]]

    rows = []
    for name, kern in backends.items():
        t_lag = best_of(lambda: [kern.lag_products(z.samples, lagw) for z in segs], args.repeat)
        t_peak = best_of(lambda: [kern.first_prominent_peaks(tf.values, 77, 154, 0.5)
                                  for tf in tfs for _ in range(10)], args.repeat)
        t_pwvd = best_of(lambda: [pwvd(z, window, kernels=kern) for z in segs], args.repeat)
        rows.append((name, t_lag, t_peak, t_pwvd))

    print(f"{'backend':<8} {'lag_products':>14} {'ridge peaks':>14} {'pwvd':>10}   "
          f"({args.segments} segments of 152 samples)")
    for name, a, b, c in rows:
        print(f"{name:<8} {a * 1e3:>12.2f}ms {b * 1e3:>12.2f}ms {c * 1e3:>8.2f}ms")

    z = segs[0]
    t_direct = best_of(lambda: wvd_direct(z.samples, fs, interpolate=False), 1)
    t_fast = best_of(lambda: pwvd(z), args.repeat)
    print(f"plain WVD, one 152-sample segment: direct sum {t_direct * 1e3:.1f}ms, "
          f"FFT path {t_fast * 1e3:.2f}ms")

    audio, _ = synth_speechlike(args.seconds, 16000.0, seed=1)
    for name, kern in backends.items():
        with mock.patch.object(pwvd_mod, "_kernels", kern):
            wall = best_of(lambda: track_pitch(audio), max(1, args.repeat // 2))
        print(f"tracker, {name:<6} kernels: {wall:.3f}s for {args.seconds:g}s audio "
              f"(RT factor {wall / args.seconds:.4f})")


if __name__ == "__main__":
    main()
