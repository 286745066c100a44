from __future__ import annotations

import random
from fractions import Fraction

from tropicount.lp import (
    fm_feasible,
    fm_point,
    implicit_equalities,
    ineq,
    is_feasible,
    remove_redundant,
    simplex_max,
    simplex_point,
)


def _square():
    return [ineq((1, 0), 0), ineq((-1, 0), 1), ineq((0, 1), 0), ineq((0, -1), 1)]


def test_fm_point_satisfies_strict_and_closed_rows():
    qs = _square() + [ineq((1, 1), -1, strict=True)]
    p = fm_point(qs, 2)
    assert p is not None and all(q.holds(p) for q in qs)
    assert not fm_feasible(qs + [ineq((-1, -1), 1)], 2)


def test_simplex_optimum():
    res = simplex_max((1, 2), _square(), 2)
    assert res.status == "optimal" and res.value == 3
    assert simplex_max((1, 0), [ineq((1, 0), 0)], 2).status == "unbounded"
    assert simplex_max((1, 0), [ineq((1, 0), -2), ineq((-1, 0), 1)], 2).status == "infeasible"


def test_simplex_and_fm_agree_on_random_boxes():
    rng = random.Random(1)
    for _ in range(150):
        qs = [ineq([rng.randint(-3, 3) for _ in range(3)], rng.randint(-3, 3)) for _ in range(6)]
        assert fm_feasible(qs, 3) == (simplex_point(qs, 3) is not None)
        p = simplex_point(qs, 3)
        if p is not None:
            assert all(q.holds(p) for q in qs)


def test_high_dimension_uses_simplex():
    qs = [ineq([int(i == j) for j in range(5)], 0) for i in range(5)]
    qs.append(ineq([-1] * 5, 1))
    assert is_feasible(qs, 5)
    qs.append(ineq([1] * 5, Fraction(-3, 2)))
    assert not is_feasible(qs, 5)


def test_remove_redundant_and_implicit_equalities():
    qs = _square() + [ineq((1, 1), 5), ineq((2, 0), 0)]
    red = remove_redundant(qs, 2)
    assert len(red) == 4
    assert remove_redundant([ineq((1,), -1), ineq((-1,), 0)], 1) is None
    eq = [ineq((1, 0), 0), ineq((-1, 0), 0), ineq((0, 1), 0)]
    assert implicit_equalities(eq, 2) == [0, 1]
