"""Compiled versus pure-Python kernels.

Micro-benchmarks call both kernel modules on the same seeded inputs and
check that the answers agree; the end-to-end case runs the plane cubic
count in a subprocess per backend.

    python benchmarks/bench_kernels.py [--repeat N] [--skip-count]
"""

from __future__ import annotations

import argparse
import copy
import os
import random
import subprocess
import sys
import time

from tropicount import _pykernels

try:
    from tropicount import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _matrices(rng, count, rows, cols, lo=-6, hi=6):
    return [[[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)] for _ in range(count)]


def _ineq_systems(rng, count, dim, rows):
    out = []
    for _ in range(count):
        out.append([tuple(rng.randint(-4, 4) for _ in range(dim + 1)) + (int(rng.random() < 0.3),)
                    for _ in range(rows)])
    return out


def cases(seed: int = 0):
    rng = random.Random(seed)
    return {
        "int_rank 8x10": ("int_rank", [(m,) for m in _matrices(rng, 400, 8, 10)]),
        "snf_diagonal 8x12": ("snf_diagonal", [(m,) for m in _matrices(rng, 200, 8, 12)]),
        "solve_int 6x9": ("solve_int", [(m, 8) for m in _matrices(rng, 2000, 6, 9)]),
        "reduce_ineqs_int d3": ("reduce_ineqs_int", [(s, 3) for s in _ineq_systems(rng, 400, 3, 8)]),
        "fm_feasible_int d5": ("fm_feasible_int", [(s, 5) for s in _ineq_systems(rng, 200, 5, 9)]),
    }


def _time(mod, name, inputs, repeat):
    fn = getattr(mod, name)
    best, out = None, None
    for _ in range(repeat):
        data = copy.deepcopy(inputs)  # kernels may mutate their arguments
        t = time.perf_counter()
        out = [fn(*args) for args in data]
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, out


def run_micro(repeat: int) -> list[tuple[str, float, float | None]]:
    rows = []
    for label, (name, inputs) in cases().items():
        tp, outp = _time(_pykernels, name, inputs, repeat)
        tc = None
        if _ckernels is not None:
            tc, outc = _time(_ckernels, name, inputs, repeat)
            if outc != outp:
                raise AssertionError(f"{label}: backends disagree")
        rows.append((label, tp, tc))
    return rows


_COUNT = """
import time
from tropicount import _kernels
from tropicount.combinatorics import Degree
from tropicount.constraints import AffineConstraint
from tropicount.multiplicity import count_tropical
pts = [(0,0),(7919,-3301),(-6151,4877),(2473,8209),(-9013,-1597),(5381,-6737),(-2207,-8563),(8861,2711)]
d = Degree.from_mapping(2, {(-1,0):3,(0,-1):3,(1,1):3})
t = time.perf_counter()
r = count_tropical(d, [AffineConstraint.point(p) for p in pts])
print(_kernels.BACKEND, r.total, time.perf_counter() - t)
"""


def run_count() -> list[tuple[str, int, float]]:
    out = []
    for pure in ("1", "0"):
        env = dict(os.environ, TROPICOUNT_PURE_PYTHON=pure)
        res = subprocess.run([sys.executable, "-c", _COUNT], env=env, capture_output=True, text=True, check=True)
        backend, total, secs = res.stdout.split()
        out.append((backend, int(total), float(secs)))
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-count", action="store_true")
    args = ap.parse_args(argv)
    print(f"{'kernel':<22}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    for label, tp, tc in run_micro(args.repeat):
        if tc is None:
            print(f"{label:<22}{tp:>10.3f}{'-':>10}{'-':>9}")
        else:
            print(f"{label:<22}{tp:>10.3f}{tc:>10.3f}{tp / tc:>8.2f}x")
    if not args.skip_count:
        print()
        for backend, total, secs in run_count():
            print(f"plane cubic count, {backend:<7} total {total:>3}  {secs:.2f} s")


if __name__ == "__main__":
    main()
