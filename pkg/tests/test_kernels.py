from __future__ import annotations

import copy
import random
from fractions import Fraction

import pytest

from tropicount import _kernels, _pykernels
from tropicount.linalg import affine_solve, rank, rref
from tropicount.lp import ineq, simplex_point

try:
    from tropicount import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _matrices(rng, count, rows, cols, lo=-5, hi=5):
    return [[[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)] for _ in range(count)]


def _systems(rng, count, dim, nrows):
    return [
        [tuple(rng.randint(-4, 4) for _ in range(dim + 1)) + (int(rng.random() < 0.3),) for _ in range(nrows)]
        for _ in range(count)
    ]


def test_backend_reported():
    assert _kernels.BACKEND in ("cython", "python")
    if _ckernels is not None:
        assert _kernels.BACKEND == "cython" or _kernels.int_rank is _pykernels.int_rank


@needs_ext
@pytest.mark.parametrize(
    "name,make",
    [
        ("int_rank", lambda rng: [(m,) for m in _matrices(rng, 200, 5, 7)]),
        ("snf_diagonal", lambda rng: [(m,) for m in _matrices(rng, 200, 4, 6)]),
        ("solve_int", lambda rng: [(m, 6) for m in _matrices(rng, 300, 4, 7)]),
        ("reduce_ineqs_int", lambda rng: [(s, 3) for s in _systems(rng, 150, 3, 7)]),
        ("fm_feasible_int", lambda rng: [(s, 4) for s in _systems(rng, 150, 4, 8)]),
    ],
)
def test_backends_agree(name, make):
    inputs = make(random.Random(11))
    py = [getattr(_pykernels, name)(*a) for a in copy.deepcopy(inputs)]
    cy = [getattr(_ckernels, name)(*a) for a in copy.deepcopy(inputs)]
    assert py == cy


def test_int_rank_matches_rref():
    rng = random.Random(2)
    for m in _matrices(rng, 200, 4, 5, -3, 3):
        assert _kernels.int_rank(copy.deepcopy(m)) == len(rref(m)[1]) == rank(m)


def test_solve_int_matches_rational_solver():
    rng = random.Random(5)
    for m in _matrices(rng, 300, 3, 6, -4, 4):
        a = [r[:5] for r in m]
        b = [r[5] for r in m]
        got = _kernels.solve_int(copy.deepcopy(m), 5)
        want = affine_solve(a, b, 5)
        assert (got is None) == (want is None)
        if got is None:
            continue
        den, x0, kernel = got
        x = [Fraction(v, den) for v in x0]
        for row, bi in zip(a, b):
            assert sum(ai * xi for ai, xi in zip(row, x)) == bi
        assert len(kernel) == len(want[1])
        for k in kernel:
            assert all(isinstance(v, int) for v in k)
            assert all(sum(ai * ki for ai, ki in zip(row, k)) == 0 for row in a)
        if kernel:
            assert rank([list(k) for k in kernel]) == len(kernel)


def _as_ineqs(rows, dim):
    return [ineq(r[:dim], r[dim], bool(r[dim + 1])) for r in rows]


def test_fm_feasibility_matches_simplex_on_closed_systems():
    rng = random.Random(9)
    agree = feasible = 0
    for rows in _systems(rng, 300, 3, 7):
        rows = [r[:-1] + (0,) for r in rows]
        fm = _kernels.fm_feasible_int(copy.deepcopy(rows), 3)
        sp = simplex_point(_as_ineqs(rows, 3), 3) is not None
        assert fm == sp
        agree += 1
        feasible += fm
    assert 0 < feasible < agree


def test_strict_rows_make_a_point_infeasible():
    # x >= 0 and -x >= 0 is the point 0; making either strict empties it
    assert _kernels.fm_feasible_int([(1, 0, 0), (-1, 0, 0)], 1)
    assert not _kernels.fm_feasible_int([(1, 0, 1), (-1, 0, 0)], 1)


def test_reduce_keeps_solution_set():
    rng = random.Random(4)
    for rows in _systems(rng, 120, 2, 6):
        red = _kernels.reduce_ineqs_int(copy.deepcopy(rows), 2)
        if red is None:
            assert not _kernels.fm_feasible_int(copy.deepcopy(rows), 2)
            continue
        assert len(red) <= len(rows)
        full = _as_ineqs(rows, 2)
        small = _as_ineqs(red, 2)
        for x in range(-6, 7):
            for y in range(-6, 7):
                p = (Fraction(x, 2), Fraction(y, 2))
                assert all(q.holds(p) for q in full) == all(q.holds(p) for q in small)
