"""Time the compiled kernels against the pure-Python fallback.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``.
"""
import argparse
import timeit

import numpy as np

from hopfnode import _fallback

try:
    from hopfnode import _kernels
except ImportError:
    _kernels = None


def cases():
    z = np.linspace(-4, 4, 2000) * np.exp(0.7j)
    return {
        "airy_maclaurin (2000 pts)": lambda m: m.airy_maclaurin(z),
        "airy_ode_march (2000 pts x 20 steps)": lambda m: m.airy_ode_march(z, 1.0, 0.0, z + 3.0, 20),
        "rk4_linear (80000 steps)": lambda m: m.rk4_linear(-4.0, 0.0, 0.0, 1e-4, 80000,
                                                            0.002, 0.3, 0.0, -1.0),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; run `pip install --no-build-isolation -e .`")
    print(f"{'kernel':40s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases().items():
        slow = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{name:40s} {slow:11.4f} {'-':>11s} {'-':>8s}")
            continue
        fast = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat))
        print(f"{name:40s} {slow:11.4f} {fast:11.4f} {slow / fast:8.1f}")


if __name__ == "__main__":
    main()
