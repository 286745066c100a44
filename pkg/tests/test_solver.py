from __future__ import annotations

from fractions import Fraction as F

import pytest

from tropicount.combinatorics import Degree, enumerate_marked_types, enumerate_types
from tropicount.constraints import (
    AffineConstraint,
    InvalidConstraints,
    random_generic_translation,
    validate_constraints,
)
from tropicount.solver import (
    CurveSolution,
    MatchStatus,
    NoSolutionReason,
    Violation,
    genericity_audit,
    match_type,
    matching_system,
)

LINE = Degree.from_mapping(2, {(-1, 0): 1, (0, -1): 1, (1, 1): 1})
P = AffineConstraint.point


def _line_type(first=(-1, 0), second=(0, -1)):
    (t,) = enumerate_types(LINE)
    idx = {t.edges[i].direction: i for i in range(3)}
    return t.with_markings((idx[first], idx[second]))


def test_line_through_two_points():
    res = match_type(_line_type(), [P((-2, 0)), P((0, -3))])
    assert res.status is MatchStatus.MATCHED
    s = res.solution
    assert s.vertex_positions == ((0, 0),)
    assert [t for t, _ in s.marking_params] == [2, 3]
    assert s.marked_point(0) == (-2, 0) and s.marked_point(1) == (0, -3)
    assert genericity_audit(s, [P((-2, 0)), P((0, -3))]).clean


def test_line_wrong_side_is_positivity_failure():
    res = match_type(_line_type(), [P((1, 1)), P((0, -3))])
    assert res.status is MatchStatus.NO_SOLUTION
    assert res.reason is NoSolutionReason.POSITIVITY


def test_marked_point_on_the_vertex_is_flagged():
    t = _line_type((-1, 0), (1, 1))
    cons = [P((-1, 0)), P((1, 2))]
    res = match_type(t, cons)
    assert res.status is MatchStatus.MATCHED
    assert res.solution.marking_params[0][0] == 0
    assert Violation.MARKED_POINT_AT_VERTEX in genericity_audit(res.solution, cons).kinds()


def test_vertex_on_constraint_is_reported():
    cons = [P((0, 0)), P((0, -3))]
    res = match_type(_line_type(), cons)
    assert res.status is MatchStatus.MATCHED
    kinds = genericity_audit(res.solution, cons).kinds()
    assert Violation.VERTEX_ON_CONSTRAINT in kinds
    assert Violation.MARKED_POINT_AT_VERTEX in kinds


def test_coincident_vertices_are_reported():
    conic = Degree.from_mapping(2, {(-1, 0): 2, (0, -1): 2, (1, 1): 2})
    t = enumerate_types(conic)[0]
    s = CurveSolution(t, tuple((F(0), F(0)) for _ in range(t.num_vertices)),
                      {ei: F(0) for ei in t.bounded_edges}, ())
    kinds = genericity_audit(s, []).kinds()
    assert Violation.NON_INJECTIVE_VERTICES in kinds
    assert Violation.TRIVALENCE in kinds


def test_matching_system_shape():
    t = _line_type()
    rows, rhs, lay = matching_system(t, [P((-2, 0)), P((0, -3))])
    assert lay.ncols == 2 + 2  # h(V) plus t_1, t_2
    assert len(rows) == len(rhs) == 4


def test_solution_json_round_trip():
    s = match_type(_line_type(), [P((-2, 0)), P((0, -3))]).solution
    again = CurveSolution.from_json(s.to_json())
    assert again.to_json() == s.to_json()
    assert again.type.code() == s.type.code()


def test_validate_constraints():
    validate_constraints(LINE, [P((0, 0)), P((1, 2))])
    with pytest.raises(InvalidConstraints) as exc:
        validate_constraints(LINE, [P((0, 0)), P((1, 2)), P((3, 3))])
    assert exc.value.kind == "CodimensionSum"
    quadric = Degree.from_mapping(3, {(-1, 0, 0): 2, (0, -1, 0): 2, (0, 0, -1): 2, (1, 1, 1): 2})
    lines = [AffineConstraint.make((i, 2 * i, 0), [(0, 0, 1)]) for i in range(8)]
    validate_constraints(quadric, lines)
    bad = lines[:7] + [AffineConstraint.make((9, 9, 9), [(0, 0, 2)], saturated=False)]
    with pytest.raises(InvalidConstraints) as exc:
        validate_constraints(quadric, bad)
    assert exc.value.kind == "UnsaturatedBasis"


def test_random_translation():
    cons = [P((0, 0)), P((1, 2))]
    a = random_generic_translation(cons, 5, 100)
    assert a == random_generic_translation(cons, 5, 100)
    assert a != random_generic_translation(cons, 6, 100)
    assert random_generic_translation(cons, 5, 0) == cons
    small = random_generic_translation(cons, 5, 10, denominator=1000)
    assert all(abs(x) <= F(10, 1000) + 2 for c in small for x in c.base)


def test_constraint_contains():
    line = AffineConstraint.make((1, 0, 0), [(0, 0, 1)])
    assert line.contains((1, 0, 7)) and not line.contains((1, 1, 0))
    assert line.codim == 1 and line.dim == 1


def test_every_marked_line_type_is_matched_or_rejected_once():
    cons = [P((-5, 1)), P((2, -7))]
    matched = [t for t in enumerate_marked_types(LINE, 2, [1, 1])
               if match_type(t, cons).status is MatchStatus.MATCHED]
    assert len(matched) == 1
