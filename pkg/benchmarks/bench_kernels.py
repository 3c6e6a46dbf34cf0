"""Compare the compiled stencil kernel with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times a single-axis kernel call and a full residual evaluation (the unit of
work in the finite-difference Jacobian) for each scheme on 1D and 2D grids.
"""

import argparse
import timeit

import numpy as np

from hjfd import stencil
from hjfd.grid import build_grid
from hjfd.operators import _axis_view_shape
from hjfd.problems import registry
from hjfd.schemes import SchemeConfig, SchemeKind, build_band, evaluate

CASES = [("1d-ex1", 1001), ("1d-ex1", 10001), ("2d-ex4", 100), ("2d-ex4", 200)]


def best_time(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if "cython" not in stencil.BACKENDS:
        print("compiled kernel not built; only the fallback is available")
    backends = sorted(stencil.BACKENDS)
    print(f"{'problem':8s} {'n':>6s} {'scheme':6s} {'what':9s} " + " ".join(f"{b:>12s}" for b in backends) + "  speed-up")
    for name, n in CASES:
        P = registry(name)
        g = build_grid(P.domain, n)
        cfg = SchemeConfig.for_dimension(P.dim)
        rng = np.random.default_rng(0)
        V = P.exact(g.mesh) + 1e-3 * rng.standard_normal(g.shape)
        bounds = build_band(P.exact(g.mesh), 1.0, g.h)
        s3 = _axis_view_shape(g.shape, 0)
        for kind in SchemeKind:
            times = {}
            for b in backends:
                kernel = stencil.BACKENDS[b]
                grad, lin = np.zeros(g.shape), np.zeros(g.shape)
                flags = np.zeros(g.shape, dtype=np.uint8)
                times[b, "kernel"] = best_time(lambda: kernel(
                    V.reshape(s3), g.spacing[0], cfg.bc.code, kind.code, 0.0, cfg.gamma * g.h,
                    bounds.lower.reshape(s3), bounds.upper.reshape(s3), grad.reshape(s3), lin.reshape(s3),
                    flags.reshape(s3)), args.repeat)
                times[b, "residual"] = best_time(lambda: evaluate(P, g, cfg, kind, V, bounds, b), args.repeat)
            for what in ("kernel", "residual"):
                row = [times[b, what] for b in backends]
                speed = times["python", what] / times["cython", what] if "cython" in backends else 1.0
                print(f"{name:8s} {n:6d} {kind.value:6s} {what:9s} "
                      + " ".join(f"{t * 1e6:10.1f}us" for t in row) + f"  {speed:7.2f}x")


if __name__ == "__main__":
    main()
