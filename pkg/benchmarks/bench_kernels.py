"""Time the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Both backends are imported
directly so the comparison does not depend on ``COGRELAY_PURE_PYTHON``.
"""
from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from cogrelay import _kernels_py

try:
    from cogrelay import _kernels
except ImportError:  # extension not built
    _kernels = None


def _cases(rng):
    n1, n2 = rng.uniform(0.5, 4.0, 2)
    rho2 = rng.uniform()
    p = 10.0
    gamma1 = rng.uniform(0.1, 0.9) * p * n1
    ps = np.linspace(0.0, 50.0, 4096)
    phi_args = (ps, 4.0, 4.0, rho2, 5.0, 0.088, 0.088, 2.0, 3.0, 1e-4, 3.0)
    oracle_args = (1.3, 0.6, 0.9, 1.0, 2.0, 10.0, [0.0] * 4,
                   [math.pi / 2, 2 * math.pi, math.pi / 2, 2 * math.pi], 24)
    return {
        "canonical_gamma2": ((n1, n2, rho2, gamma1, 1.0, p), 20000),
        "phi_curve[4096]": (phi_args, 20),
        "oracle_grid[24^4]": (oracle_args, 5),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    names = {"canonical_gamma2": "canonical_gamma2", "phi_curve[4096]": "phi_curve",
             "oracle_grid[24^4]": "oracle_grid"}
    print(f"{'kernel':<22}{'python (s/call)':>18}{'cython (s/call)':>18}{'speedup':>10}")
    for label, (call_args, number) in _cases(rng).items():
        fn = names[label]
        py = min(timeit.repeat(lambda: getattr(_kernels_py, fn)(*call_args),
                               number=number, repeat=args.repeat)) / number
        if _kernels is None:
            print(f"{label:<22}{py:>18.3e}{'n/a':>18}{'':>10}")
            continue
        cy = min(timeit.repeat(lambda: getattr(_kernels, fn)(*call_args),
                               number=number, repeat=args.repeat)) / number
        print(f"{label:<22}{py:>18.3e}{cy:>18.3e}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
