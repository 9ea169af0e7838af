"""Timing of the numba kernels against their numpy twins.

Run:  python benchmarks/bench_kernels.py [--repeat 5]

The first section calls both implementations directly on the same inputs
and reports the max abs difference.  The second runs a full energy
evaluation in a fresh interpreter with OHARA_NUMBA=1 and OHARA_NUMBA=0,
since the backend is chosen once at import.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from ohara import _kernels as K
from ohara.curve import cumulative_arclength, length, perturbed_circle


def best_of(fn, repeat):
    fn()  # warm-up (triggers compilation on the numba side)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def kernel_cases(n):
    rng = np.random.default_rng(1)
    curve = perturbed_circle(n)
    pts = np.ascontiguousarray(curve.samples)
    cum = cumulative_arclength(curve, curve.params)
    L = length(curve)
    dg = rng.standard_normal((64, n, 3)) + 2.0
    r = 1.0 + rng.uniform(-2e-4, 2e-4, size=200_000)
    return {
        "chord_powers": (lambda: K.chord_powers_numba(dg, 2.5)[0],
                         lambda: K.chord_powers_numpy(dg, 2.5)[0]),
        "bilipschitz_scan": (lambda: np.array(K.bilipschitz_scan_numba(pts, cum, L)[0]),
                             lambda: np.array(K.bilipschitz_scan_numpy(pts, cum, L)[0])),
        "g_beta": (lambda: K.g_beta_numba(r, 4.5, K.SERIES_RADIUS),
                   lambda: K.g_beta_numpy(r, 4.5)),
    }


ENERGY_SNIPPET = """
import time
from ohara.curve import perturbed_circle
from ohara.energy import EnergyParams, energy
c = perturbed_circle({n}); p = EnergyParams(alpha=2.5)
energy(c, p)
t0 = time.perf_counter()
for _ in range({repeat}):
    v = energy(c, p).value
print(f"{{(time.perf_counter() - t0) / {repeat}:.4f}} {{v:.12g}}")
"""


def energy_run(flag, n, repeat):
    env = dict(os.environ, OHARA_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", ENERGY_SNIPPET.format(n=n, repeat=repeat)],
                         env=env, capture_output=True, text=True, check=True).stdout.split()
    return float(out[0]), out[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"{'kernel':<18}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, (fast, ref) in kernel_cases(args.n).items():
        t_nb, a = best_of(fast, args.repeat)
        t_np, b = best_of(ref, args.repeat)
        diff = float(np.max(np.abs(a - b)))
        print(f"{name:<18}{t_nb:>12.5f}{t_np:>12.5f}{t_np / t_nb:>10.2f}{diff:>12.2e}")

    t1, v1 = energy_run("1", args.n, args.repeat)
    t0, v0 = energy_run("0", args.n, args.repeat)
    print(f"\nenergy N={args.n}: OHARA_NUMBA=1 {t1:.4f}s ({v1}), OHARA_NUMBA=0 {t0:.4f}s ({v0})")


if __name__ == "__main__":
    main()
