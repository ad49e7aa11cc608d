"""Time the numba and numpy kernel backends on the same inputs.

Usage: ``python benchmarks/bench_kernels.py [--m 60] [--repeat 5]``

Prints one row per kernel with the best-of-``repeat`` wall time for each
backend, the speedup, and the max abs difference between the two results.
"""
import argparse
import time

import numpy as np

from btq import _backend, _kernels
from btq.geometry import homogeneous_from_chart0, manifold, standard_function
from btq.hilbert import build_section_space
from btq.operators import toeplitz


def best_time(fn, repeat):
    fn()  # warm-up (and numba compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=60)
    ap.add_argument("--points", type=int, default=40_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    sp = build_section_space(manifold("cp1"), args.m)
    rule = sp.rule
    z = rng.normal(size=args.points) + 1j * rng.normal(size=args.points)
    hom = homogeneous_from_chart0(z, 1)
    phi = sp.section_values(hom)
    a = toeplitz(sp, standard_function("x1")).entries
    w = (rule.weights * standard_function("x3")(rule.nodes)).astype(complex)
    levels = np.array(sp.levels)

    cases = {
        "weighted_monomials": lambda: _kernels.weighted_monomials(hom, sp.exponents, levels),
        "cross_gram": lambda: _kernels.cross_gram(sp.phi_nodes, w, sp.phi_nodes),
        "expectation": lambda: _kernels.expectation(phi, a),
        "overlap": lambda: _kernels.overlap(phi[:2000], phi[2000:4000]),
    }
    if not _backend.HAS_NUMBA:
        print("numba not importable; only the numpy backend is available")
        return
    print(f"m={args.m}  points={args.points}  repeat={args.repeat}")
    print(f"{'kernel':<20}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max |diff|':>13}")
    old = _backend.get_backend()
    try:
        for name, fn in cases.items():
            _backend.set_backend("numpy")
            t_np, ref = best_time(fn, args.repeat)
            _backend.set_backend("numba")
            t_nb, out = best_time(fn, args.repeat)
            diff = float(np.max(np.abs(ref - out)))
            print(f"{name:<20}{t_np:12.4f}{t_nb:12.4f}{t_np / t_nb:10.2f}{diff:13.2e}")
    finally:
        _backend.set_backend(old)


if __name__ == "__main__":
    main()
