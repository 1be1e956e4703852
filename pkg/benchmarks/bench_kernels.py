"""Compiled versus pure-Python kernels on the sampler's inner loop.

    python benchmarks/bench_kernels.py [--steps 20000] [--thin 10]

Both backends get the same pre-drawn random numbers, so the check that
their recorded chains are identical doubles as a correctness test.
"""
import argparse
import time

import numpy as np

from jastrow_forge import kernels
from jastrow_forge.core import Harmonic, build_model
from jastrow_forge.pair_functions import GaussianPair, HyperGaussian, PowerLaw, SinhPow

CASES = [
    ("calogero", PowerLaw(2.0)),
    ("gaussian", GaussianPair(-0.3)),
    ("hyperbolic", SinhPow(2.0, 1.0)),
    ("hyper_gaussian", HyperGaussian(-0.2, 3.0)),
]


def run(model, steps, thin, backend, repeats=3):
    km = kernels.pack(model)
    rng = np.random.default_rng(0)
    disp, acc = rng.uniform(-1, 1, steps), rng.random(steps)
    best = np.inf
    for _ in range(repeats):
        x = np.linspace(-1.0, 1.0, model.n)
        ox = np.zeros((steps // thin, model.n))
        oe = np.zeros(steps // thin)
        t0 = time.perf_counter()
        kernels.metropolis(x, km, disp, acc, 0.4, thin, ox, oe, prefer=backend)
        best = min(best, time.perf_counter() - t0)
    return best, ox, oe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--thin", type=int, default=10)
    ap.add_argument("--sizes", type=int, nargs="+", default=[3, 8])
    args = ap.parse_args()
    if kernels._ckernel is None:
        raise SystemExit("compiled kernel not built; reinstall with Cython available")
    print(f"{'model':16s} {'N':>3s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s} {'same chain':>10s}")
    for name, pair in CASES:
        for n in args.sizes:
            m = build_model(pair, n, Harmonic(), omega=1.0)
            tp, xp, ep = run(m, args.steps, args.thin, "python", repeats=1)
            tc, xc, ec = run(m, args.steps, args.thin, "cython")
            same = np.array_equal(xp, xc) and np.allclose(ep, ec, rtol=1e-13, atol=1e-13)
            print(f"{name:16s} {n:3d} {tp:11.4f} {tc:11.5f} {tp / tc:8.1f} {str(same):>10s}")


if __name__ == "__main__":
    main()
