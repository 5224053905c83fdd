"""Compare the compiled and numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from ballconv import Ball, converge_primal
from ballconv.floating import default_deltas
from ballconv.kernels import load_backend


def _inputs(seed=0):
    rng = np.random.default_rng(seed)
    m = 1024
    th = np.sort(rng.uniform(-np.pi, np.pi, m))
    centers = -0.99 * np.stack([np.cos(th), np.sin(th)], axis=1)
    rays = np.stack([np.cos(th), np.sin(th)], axis=1)
    psi = rng.uniform(-np.pi, np.pi, 4096)
    x = rng.normal(size=1 << 16)
    return x, rays, centers, th, psi


def bench(mod, repeat):
    x, rays, centers, th, psi = _inputs()
    lo, hi = mod.family_arcs_2d(centers, th, 2.0)
    cases = {
        "pairwise_sum (65536)": lambda: mod.pairwise_sum(x),
        "ray_ball_exit_min (1024 x 1024)": lambda: mod.ray_ball_exit_min(rays, centers, 2.0),
        "family_arcs_2d (1024)": lambda: mod.family_arcs_2d(centers, th, 2.0),
        "family_support_2d (4096 x 1024)": lambda: mod.family_support_2d(psi, centers, th, lo, hi, 2.0),
    }
    return {name: min(timeit.repeat(fn, number=1, repeat=repeat)) for name, fn in cases.items()}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    py = load_backend("python")
    try:
        cy = load_backend("cython")
    except ImportError:
        cy = None
        print("compiled extension not built; timing the numpy backend only")
    tp = bench(py, args.repeat)
    tc = bench(cy, args.repeat) if cy else {}
    print(f"{'kernel':36s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, t in tp.items():
        c = tc.get(name)
        extra = f"{1e3 * c:12.3f} {t / c:8.1f}" if c else ""
        print(f"{name:36s} {1e3 * t:11.3f} {extra}")
    disk = Ball((0.0, 0.0), 1.0)
    t = min(timeit.repeat(lambda: converge_primal(disk, 2.0, deltas=default_deltas(disk, 6)), number=1, repeat=2))
    print(f"\nend-to-end primal convergence run (active backend): {t:.2f} s")


if __name__ == "__main__":
    main()
