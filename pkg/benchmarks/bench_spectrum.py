#!/usr/bin/env python3
"""Benchmark the compiled spectrum kernel against the numpy fallback.

Times the per-grid-point sinc sum on representative workloads, checks the
two implementations agree, and prints a comparison table.

    python3 benchmarks/bench_spectrum.py [--points 262144] [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from caseq._kernels import COMPILED, spectrum_power, spectrum_power_fallback


def workload(n_sub: int, points: int):
    rng = np.random.default_rng(42)
    amps = np.ascontiguousarray(
        np.exp(2j * np.pi * rng.random(n_sub)) / math.sqrt(n_sub))
    sub = np.ascontiguousarray(np.arange(float(n_sub)))
    freqs = np.ascontiguousarray(
        np.linspace(-16.0 * n_sub, 17.0 * n_sub, points))
    return freqs, amps, sub, 1.12890625


def best_time(fn, *args, repeat: int) -> float:
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=2 ** 18)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    print(f"compiled extension available: {COMPILED}")
    header = f"{'subcarriers':>12} {'points':>9} {'numpy (s)':>10} "
    header += f"{'compiled 1t (s)':>16} {'compiled Nt (s)':>16} {'speedup':>8}"
    print(header)
    for n_sub in (48, 139, 839):
        freqs, amps, sub, t = workload(n_sub, args.points)
        t_np = best_time(spectrum_power_fallback, freqs, amps, sub, t,
                         repeat=args.repeat)
        if COMPILED:
            t_c1 = best_time(spectrum_power, freqs, amps, sub, t, 1,
                             repeat=args.repeat)
            t_cn = best_time(spectrum_power, freqs, amps, sub, t, args.threads,
                             repeat=args.repeat)
            a = spectrum_power(freqs, amps, sub, t, args.threads)
            b = spectrum_power_fallback(freqs, amps, sub, t)
            rel = np.max(np.abs(a - b)) / max(a.max(), b.max())
            if rel > 1e-9:
                raise SystemExit(f"kernel mismatch: rel error {rel}")
            print(f"{n_sub:>12} {args.points:>9} {t_np:>10.3f} "
                  f"{t_c1:>16.3f} {t_cn:>16.3f} {t_np / t_cn:>8.1f}x")
        else:
            print(f"{n_sub:>12} {args.points:>9} {t_np:>10.3f} "
                  f"{'-':>16} {'-':>16} {'-':>8}")
    print("agreement verified to 1e-9 relative" if COMPILED else
          "build the extension (pip install -e .) to compare")


if __name__ == "__main__":
    main()
