"""Time the numba and numpy versions of each enumeration kernel.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel: best-of-N seconds for each backend, the speedup
and the largest absolute difference between the two results.  The numba
timing excludes compilation (one warm-up call first).
"""
import argparse
import time

import numpy as np

from noisecorr import kernels
from noisecorr._accel import HAS_NUMBA
from noisecorr.correlation import _pack, column_moments
from noisecorr.fourier import DenseFunction, default_bases
from noisecorr.gowers import addition_table
from noisecorr.instances import generate_random_lowdeg
from noisecorr.spaces import ap_distribution, gowers_cube_distribution


def best_of(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    mu = gowers_cube_distribution(2, 2)
    n = 5
    fs = [rng.standard_normal((2,) * n) + 1j * rng.standard_normal((2,) * n) for _ in range(mu.k)]
    values = np.concatenate([f.ravel() for f in fs])
    offsets = np.arange(mu.k + 1, dtype=np.int64) * 2 ** n
    qs = np.array(mu.sizes, np.int64)
    yield "nip_bruteforce cube(2,2) n=5", "nip_bruteforce", (
        values, offsets, qs, mu.support, mu.mass, n)

    mu = ap_distribution(5, 3)
    n = 3
    bases = default_bases(mu)
    M = column_moments(mu, bases)
    fhats = [generate_random_lowdeg(5, n, 3, rng) for _ in range(3)]
    idx = np.concatenate([np.array(list(f.coeffs), np.int64) for f in fhats])
    vals = np.concatenate([np.array(list(f.coeffs.values()), complex) for f in fhats])
    off = np.zeros(4, np.int64)
    off[1:] = np.cumsum([len(f.coeffs) for f in fhats])
    masks = M.zero_prefix_masks()
    zoff = np.zeros(len(masks) + 1, np.int64)
    zoff[1:] = np.cumsum([len(z) for z in masks])
    yield "nip_sparse ap(5,3) n=3 d=3", "nip_sparse", (
        idx, vals, off, np.array(M.sizes, np.int64), M.table.ravel(),
        np.concatenate(masks), zoff, n)

    add = addition_table(3, 2)
    f = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    yield "gowers_direct p=3 n=2 d=3", "gowers_direct", (f, add, 3)

    add = addition_table(2, 10)
    f = rng.standard_normal(1024) + 0j
    yield "u2_power p=2 n=10", "u2_power", (f, add)

    mu = ap_distribution(3, 3)
    dense = [DenseFunction((3,) * 6, rng.standard_normal((3,) * 6) + 0j) for _ in range(3)]
    values, offsets = _pack(dense)
    choices = rng.integers(0, len(mu), size=(200_000, 6))
    yield "sample_products ap(3,3) n=6 S=2e5", "sample_products", (
        values, offsets, np.array(mu.sizes, np.int64), mu.support, choices)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':38s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s} {'max diff':>10s}")
    for label, name, kargs in cases(np.random.default_rng(args.seed)):
        t_nb, out_nb = best_of(getattr(kernels, name + "_nb"), kargs, args.repeat)
        t_np, out_np = best_of(getattr(kernels, name + "_np"), kargs, args.repeat)
        diff = float(np.max(np.abs(np.asarray(out_nb) - np.asarray(out_np))))
        print(f"{label:38s} {t_nb:10.5f} {t_np:10.5f} {t_np / t_nb:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
