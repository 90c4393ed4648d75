"""Compare the numba and numpy backends on the two combinatorial kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Each case runs once untimed (JIT warm-up), then ``--repeat`` times; the best
wall time is reported together with a check that both backends agree.
"""

from __future__ import annotations

import argparse
import time
from itertools import combinations

import numpy as np

from dynsamp import _accel
from dynsamp.groups import RANK_FLOOR, RANK_TOL, fourier_matrix, make_group
from dynsamp.spectral import kernel_from_partition, level_partition, random_partition


def best_of(fn, repeat: int) -> tuple[float, object]:
    out = fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def spark_cases():
    # full-spark blocks force a complete scan of every subset
    yield "F_13 rows 0..5, k=6", fourier_matrix(make_group(13)).entries[:6], 6
    yield "F_17 rows 0..4, k=5", fourier_matrix(make_group(17)).entries[:5], 5
    yield "F_5xF_5 rows 0..3, k=4", fourier_matrix(make_group((5, 5))).entries[:4], 4


def search_cases(rng):
    for d, L, size in ((16, 3, 4), (20, 3, 4), (25, 4, 5)):
        g = make_group(d)
        kern = kernel_from_partition(g, random_partition(d, L, rng), rng)
        part = level_partition(kern)
        combos = np.array(list(combinations(range(d), size)), dtype=np.int64)
        yield f"d={d} M_A={part.max_size} |omega|={size} ({len(combos)} sets)", \
            fourier_matrix(g).entries, part.classes, combos


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    print(f"{'case':48s} {'numpy s':>9s} {'numba s':>9s} {'speedup':>8s} agree")
    for name, mat, k in spark_cases():
        t_np, r_np = best_of(lambda: _accel.first_dependent_subset(mat, k, RANK_TOL, RANK_FLOOR, "numpy"), args.repeat)
        t_nb, r_nb = best_of(lambda: _accel.first_dependent_subset(mat, k, RANK_TOL, RANK_FLOOR, "numba"), args.repeat)
        print(f"spark  {name:41s} {t_np:9.4f} {t_nb:9.4f} {t_np / t_nb:8.1f} {r_np == r_nb}")
    for name, F, classes, combos in search_cases(rng):
        t_np, m_np = best_of(lambda: _accel.admissible_mask(F, classes, combos, RANK_TOL, RANK_FLOOR, "numpy"),
                             args.repeat)
        t_nb, m_nb = best_of(lambda: _accel.admissible_mask(F, classes, combos, RANK_TOL, RANK_FLOOR, "numba"),
                             args.repeat)
        print(f"search {name:41s} {t_np:9.4f} {t_nb:9.4f} {t_np / t_nb:8.1f} {bool(np.array_equal(m_np, m_nb))}")


if __name__ == "__main__":
    main()
