from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import check_snf, coset_count, leibniz, random_bounded_matrix
from tropicount.linalg import (
    INFINITE,
    NotSublattice,
    SolveStatus,
    ZeroVector,
    cokernel_order,
    covolume,
    det,
    hnf_rows,
    lattice_basis,
    lattice_index,
    nullspace,
    primitive_part,
    rank,
    rref,
    saturate,
    solve_rational,
)


def test_coset_oracle_agrees_on_200_random_matrices():
    rng = random.Random(20240611)
    seen_infinite = seen_nontrivial = 0
    for _ in range(200):
        m = random_bounded_matrix(rng)
        want = coset_count(m, len(m))
        got = cokernel_order(m)
        if want is None:
            assert got is INFINITE
            seen_infinite += 1
        else:
            assert got == want, m
            seen_nontrivial += want > 1
    assert seen_infinite > 0 and seen_nontrivial > 20


def test_snf_invariants_on_500_random_matrices():
    rng = random.Random(7)
    for _ in range(500):
        rows, cols = rng.randint(1, 4), rng.randint(1, 5)
        m = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        check_snf(m)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-40, 40), min_size=3, max_size=3), min_size=1, max_size=4))
def test_snf_property(m):
    check_snf(m)


def test_det_matchesleibniz():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 5)
        m = [[rng.randint(-7, 7) for _ in range(n)] for _ in range(n)]
        assert det(m) == leibniz(m)


def test_primitive_part():
    assert primitive_part((4, -6, 0)) == ((2, -3, 0), 2)
    assert primitive_part((-3,)) == ((-1,), 3)
    with pytest.raises(ZeroVector):
        primitive_part((0, 0))


def test_rref_and_nullspace():
    m = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    r, piv = rref(m)
    assert piv == [0, 1]
    for v in nullspace(m, 3):
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in m)
    assert len(nullspace(m, 3)) == 1


def test_solve_rational_statuses():
    assert solve_rational([[2, 0], [0, 3]], [1, 1]) == (SolveStatus.UNIQUE, [Fraction(1, 2), Fraction(1, 3)])
    assert solve_rational([[1, 1], [1, 1]], [0, 1]).status is SolveStatus.NONE
    assert solve_rational([[1, 1]], [1]).status is SolveStatus.UNDERDETERMINED


def test_cokernel_examples():
    assert cokernel_order([[2, 0], [0, 3]]) == 6
    assert cokernel_order([[1, 2], [2, 4]]) is INFINITE
    assert cokernel_order([[2, 4, 6]]) == 2
    assert cokernel_order([], nrows=0) == 1


def test_hnf_is_canonical():
    a = hnf_rows([[2, 4], [0, 6]])
    b = hnf_rows([[2, 10], [-2, 2], [0, 18]])
    assert a == b == [[2, 4], [0, 6]]


def test_saturation_and_index():
    sub = lattice_basis([[2, 0, 0], [0, 3, 0]], 3)
    sat = saturate([[2, 0, 0], [0, 3, 0]], 3)
    assert sat.vectors == ((1, 0, 0), (0, 1, 0))
    assert lattice_index(sub, sat) == 6
    assert covolume(sub) == 6
    assert saturate([[1, 1]], 2).vectors == ((1, 1),)
    assert saturate([[2, 2]], 2).vectors == ((1, 1),)
    with pytest.raises(NotSublattice):
        lattice_index(lattice_basis([[1, 0]], 2), lattice_basis([[2, 0]], 2))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(st.integers(-12, 12), min_size=3, max_size=3), min_size=1, max_size=3))
def test_saturation_index_is_covolume_ratio(gens):
    if rank(gens) == 0:
        return
    sub = lattice_basis(gens, 3)
    sat = saturate(gens, 3)
    assert sat.rank == sub.rank
    assert lattice_index(sub, sat) * covolume(sat) == covolume(sub)
    assert covolume(sat) == 1
