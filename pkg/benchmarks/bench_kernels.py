#!/usr/bin/env python3
"""Benchmark: compiled Newton kernel vs the pure-numpy fallback.

Runs the same pre-generated multistart batch through both backends, reports
wall time and speedup, and cross-checks that converged roots agree.

    python3 benchmarks/bench_kernels.py --n 4 --starts 400
"""

import argparse
import time

import numpy as np

from dziobek import _pykernels
from dziobek.geometry import gauge_normalize
from dziobek.reduction import free_count, free_from_coords

try:
    from dziobek import _ccore
except ImportError:
    _ccore = None

KERNEL_ARGS = (1e-11, 80, 0.5, 30, 1e-8)


def make_starts(n, count, seed):
    rng = np.random.default_rng(seed)
    d = n - 2
    out = np.empty((count, free_count(n)))
    k = 0
    while k < count:
        pts = rng.uniform(-1.5, 1.5, size=(n, d))
        if _pykernels.min_pair_distance_sq(pts) < 0.05**2:
            continue
        out[k] = free_from_coords(gauge_normalize(pts).x)
        k += 1
    return out


def run(module, starts, m, a):
    t0 = time.perf_counter()
    results = [module.newton_reduced(f, m, a, *KERNEL_ARGS) for f in starts]
    return time.perf_counter() - t0, results


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=4)
    parser.add_argument("--starts", type=int, default=400)
    parser.add_argument("--a", type=float, default=-1.5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    m = np.ones(args.n)
    starts = make_starts(args.n, args.starts, args.seed)

    t_pure, r_pure = run(_pykernels, starts, m, args.a)
    ok_pure = sum(1 for r in r_pure if r[3] == _pykernels.NEWTON_OK)
    print(f"pure-python: {t_pure:8.3f}s  converged {ok_pure}/{args.starts}")

    if _ccore is None:
        print("compiled:    unavailable (extension not built)")
        return

    t_comp, r_comp = run(_ccore, starts, m, args.a)
    ok_comp = sum(1 for r in r_comp if r[3] == _pykernels.NEWTON_OK)
    print(f"compiled:    {t_comp:8.3f}s  converged {ok_comp}/{args.starts}")
    print(f"speedup:     {t_pure / t_comp:8.1f}x")

    # agreement on starts both backends converged
    worst = 0.0
    both = 0
    for (fp, _, _, sp), (fc, _, _, sc) in zip(r_pure, r_comp):
        if sp == _pykernels.NEWTON_OK and sc == _pykernels.NEWTON_OK:
            both += 1
            worst = max(worst, float(np.max(np.abs(np.asarray(fp) - np.asarray(fc)))))
    print(f"agreement:   {both} common roots, max coordinate gap {worst:.3e}")
    if worst > 1e-8:
        raise SystemExit("backends disagree beyond Newton basin tolerance")


if __name__ == "__main__":
    main()
