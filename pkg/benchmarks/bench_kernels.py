"""Time the numba and numpy kernels on the same inputs and check they agree.

    python benchmarks/bench_kernels.py [--repeat 3]

The first numba call per shape includes JIT compilation, so it is warmed
up before timing.
"""

import argparse
import time

from icx import kernels
from icx.conjugate import price_grid
from icx.core import IntegralBox
from icx.generators import gen_random_ic


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.numba is None:
        print("numba is not installed; nothing to compare")
        return
    cases = [
        ("midpoint 2-D [-12,12]^2", 2, 12, "midpoint"),
        ("midpoint 3-D [-5,5]^3", 3, 5, "midpoint"),
        ("midpoint 4-D [-2,2]^4", 4, 2, "midpoint"),
        ("conjugate 2-D, prices [-40,40]^2", 2, 8, "conjugate"),
        ("conjugate 3-D, prices [-20,20]^3", 3, 5, "conjugate"),
    ]
    print(f"{'case':38s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for label, n, half, kind in cases:
        f = gen_random_ic(n, IntegralBox.cube(n, -half, half), seed=1, cuts=False)
        if kind == "midpoint":
            grid = kernels.dense_grid(f.table, n)
            run = {b: (lambda b=b: kernels.midpoint_violation(grid, force=b)) for b in ("numba", "numpy")}
        else:
            points, scaled, scale = f.arrays
            prices = price_grid(n, 40 if n == 2 else 20)
            run = {b: (lambda b=b: kernels.conjugate_numerators(points, scaled, scale, prices, force=b).tolist())
                   for b in ("numba", "numpy")}
        run["numba"]()
        t_nb, out_nb = _best(run["numba"], args.repeat)
        t_np, out_np = _best(run["numpy"], args.repeat)
        if out_nb != out_np:
            raise SystemExit(f"{label}: backends disagree")
        print(f"{label:38s} {t_nb * 1e3:8.1f}ms {t_np * 1e3:8.1f}ms {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
