"""Time the compiled nodal kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --points 41 81 161 --repeat 50
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from rgflow.lpa.backend import compiled_kernels, python_kernels
from rgflow.lpa.fit import ansatz_values
from rgflow.lpa.grid import FieldGrid
from rgflow.flows.couplings import MSRCouplings, ScalarCouplings


def _cases(n: int):
    grid = FieldGrid.square(0.5, n)
    x, y = grid.mesh()
    hx, hy = grid.spacing
    scalar = np.ascontiguousarray(ansatz_values("two_scalar", ScalarCouplings(0, 0.1, 0.2, 0.5, 0.4, 0.1), x, y))
    msr = np.ascontiguousarray(ansatz_values("msr_d4", MSRCouplings(0, 0.1, 0.2, 1.0), x, y))
    m = n - 2

    def scalar_call(kern):
        bufs = [np.empty((m, m)) for _ in range(5)]
        return lambda: kern.scalar_rhs(scalar, hx, hy, 1.3, 1.0, 1e-8, *bufs)

    def msr_call(kern):
        mixed, b, s = (np.empty((m, m)) for _ in range(3))

        def f():
            kern.mixed_difference(msr, hx, hy, mixed)
            kern.density(mixed, 1.3, 1.0, True, 1e-8, b, s)
        return f

    return {"two_scalar": scalar_call, "msr_d4": msr_call}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, nargs="+", default=[41, 81, 161])
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args(argv)
    compiled = compiled_kernels()
    if compiled is None:
        print("compiled extension not built; only the numpy fallback is timed")
    print(f"{'model':<12}{'points':>8}{'numpy [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for n in args.points:
        for name, make in _cases(n).items():
            t_py = min(timeit.repeat(make(python_kernels), number=args.repeat, repeat=3)) / args.repeat
            if compiled is None:
                print(f"{name:<12}{n:>8}{t_py * 1e6:>14.1f}{'-':>14}{'-':>10}")
                continue
            t_c = min(timeit.repeat(make(compiled), number=args.repeat, repeat=3)) / args.repeat
            print(f"{name:<12}{n:>8}{t_py * 1e6:>14.1f}{t_c * 1e6:>14.1f}{t_py / t_c:>10.2f}")


if __name__ == "__main__":
    main()
