from __future__ import annotations

import random
from math import prod
from fractions import Fraction as F

import pytest

from tropicount.combinatorics import Degree, Edge, TropicalType, enumerate_types
from tropicount.constraints import AffineConstraint
from tropicount.linalg import cokernel_order
from tropicount.multiplicity import (
    CountOptions,
    MultiplicityRecord,
    NonGenericConstraints,
    WrongDimension,
    check_2d_equivalence,
    count_by_enumeration,
    count_tropical,
    curve_index_D,
    delta_indices,
    kontsevich_oracle,
    lattice_map_matrix,
    mikhalkin_vertex_mult,
    total_marked_weight,
)
from tropicount.solver import MatchStatus, match_type

LINE = Degree.from_mapping(2, {(-1, 0): 1, (0, -1): 1, (1, 1): 1})
CONIC = Degree.from_mapping(2, {(-1, 0): 2, (0, -1): 2, (1, 1): 2})
CUBIC = Degree.from_mapping(2, {(-1, 0): 3, (0, -1): 3, (1, 1): 3})
P = AffineConstraint.point


def _star(dirs, weights):
    return TropicalType(2, 1, tuple(Edge((0,), w, d) for d, w in zip(dirs, weights)))


def _two_vertex(bounded_weight, marks=()):
    # V0 --(1,0) weight w--> V1, both trivalent
    w = bounded_weight
    edges = (
        Edge((0, 1), w, (1, 0)),
        Edge((0,), w, (-1, 1)),
        Edge((0,), w, (0, -1)),
        Edge((1,), w, (1, 1)),
        Edge((1,), w, (0, -1)),
    )
    return TropicalType(2, 2, edges, tuple(marks))


def test_total_marked_weight():
    assert total_marked_weight(_two_vertex(1)) == 1
    assert total_marked_weight(_two_vertex(2)) == 2
    assert total_marked_weight(_two_vertex(2, marks=(0,))) == 4
    assert total_marked_weight(_two_vertex(2, marks=(1,))) == 4


def test_mikhalkin_vertex_mult():
    assert mikhalkin_vertex_mult(_star([(1, 0), (0, 1), (-1, -1)], [1, 1, 1]), 0) == 1
    assert mikhalkin_vertex_mult(_star([(1, 0), (0, 1), (-1, -1)], [2, 2, 2]), 0) == 4
    assert mikhalkin_vertex_mult(_star([(1, 1), (1, -1), (-3, 1)], [1, 2, 1]), 0) == 4
    with pytest.raises(WrongDimension):
        mikhalkin_vertex_mult(TropicalType(3, 1, (Edge((0,), 1, (1, 0, 0)),)), 0)


def _marked_line():
    (t,) = enumerate_types(LINE)
    idx = {t.edges[i].direction: i for i in range(3)}
    return t.with_markings((idx[(-1, 0)], idx[(0, -1)]))


def test_lattice_map_of_the_line():
    t = _marked_line()
    m = lattice_map_matrix(t, [P((-2, 0)), P((0, -3))])
    assert m == [
        [1, 0, 1, 0],
        [0, 1, 0, 0],
        [1, 0, 0, 0],
        [0, 1, 0, 1],
    ]
    assert curve_index_D(t, [P((-2, 0)), P((0, -3))]) == 1
    assert delta_indices(t, [P((-2, 0)), P((0, -3))]) == (1, 1)


def test_lattice_map_is_translation_invariant():
    t = _marked_line()
    a = [P((-2, 0)), P((0, -3))]
    b = [c.translate((F(7, 3), -11)) for c in a]
    assert lattice_map_matrix(t, a) == lattice_map_matrix(t, b)


def test_empty_lattice_map():
    t = _star([(1, 0), (0, 1), (-1, -1)], [1, 1, 1])
    assert lattice_map_matrix(t, []) == []
    assert cokernel_order([], 0) == 1


def test_delta_for_line_constraints_in_space():
    t = TropicalType(3, 1, (Edge((0,), 1, (1, 0, 1)), Edge((0,), 1, (0, 1, 0)), Edge((0,), 1, (-1, -1, -1))), (0,))
    # (1,0,1) together with (-1,-4,1) spans an index-2 sublattice of its saturation
    cons = [AffineConstraint.make((0, 0, 0), [(-1, -4, 1)], saturated=False)]
    assert delta_indices(t, cons) == (2,)
    cons = [AffineConstraint.make((0, 0, 0), [(0, 0, 1)])]
    assert delta_indices(t, cons) == (1,)


def test_record_arithmetic():
    r = MultiplicityRecord(2, 3, (1, 2))
    assert r.D_tilde == 6 and r.contribution == 12


def test_kontsevich_oracle():
    assert kontsevich_oracle(1) == [1]
    assert kontsevich_oracle(3) == [1, 1, 12]
    assert kontsevich_oracle(5) == [1, 1, 12, 620, 87304]
    with pytest.raises(ValueError):
        kontsevich_oracle(0)


def _points(rng, k, box=10_000):
    return [P((rng.randint(-box, box), rng.randint(-box, box))) for _ in range(k)]


def test_line_count_and_equivalence():
    res = count_tropical(LINE, [P((3, -8)), P((-5, 2))])
    assert res.total == 1 and len(res.per_curve) == 1
    c = res.per_curve[0]
    eq = check_2d_equivalence(c.type, res.constraints_used)
    assert eq.lhs == eq.rhs == 1 and eq.equal


def test_point_on_a_weight_two_edge():
    # Cubic through 8 points with a marked point on the weight 2 bounded edge.
    # The vertex product picks up that edge's weight twice, once per end, so
    # it equals w(G, E) * D; the inner weight alone falls short by w(E_i).
    rng = random.Random(6)
    for k in range(12):
        pts = [P((rng.randint(-10**4, 10**4), rng.randint(-10**4, 10**4))) for _ in range(3 * (1 + k % 3) - 1)]
    res = count_tropical(CUBIC, pts)
    assert res.total == 12
    short = 0
    for c in res.per_curve:
        t = c.type
        eq = check_2d_equivalence(t, res.constraints_used)
        assert total_marked_weight(t) * curve_index_D(t, res.constraints_used) == eq.rhs
        marked = prod(t.edges[e].weight for e in t.markings)
        assert eq.lhs * marked == eq.rhs
        short += marked > 1
    assert short == 1


def test_conic_matches_enumeration_route():
    cons = _points(random.Random(3), 5)
    assert count_tropical(CONIC, cons).total == count_by_enumeration(CONIC, cons) == 1


def test_count_json_shape():
    res = count_tropical(CONIC, _points(random.Random(4), 5))
    data = res.to_json()
    assert data["total"] == 1
    (curve,) = data["curves"]
    assert {"code", "w", "D", "deltas", "contribution", "vertices"} <= set(curve)
    assert curve["contribution"] == curve["w"] * curve["D"]


def test_threads_do_not_change_the_result():
    cons = _points(random.Random(8), 5)
    one = count_tropical(CONIC, cons, CountOptions(threads=1)).to_json()
    four = count_tropical(CONIC, cons, CountOptions(threads=4)).to_json()
    assert one == four


def test_vertex_constraint_aborts_without_resampling():
    cons = [P((0, 0)), P((0, -3))]
    with pytest.raises(NonGenericConstraints) as exc:
        count_tropical(LINE, cons, CountOptions(allow_resample=False))
    assert exc.value.findings
    res = count_tropical(LINE, cons, CountOptions(allow_resample=True))
    assert res.total == 1 and res.attempts >= 2


def test_seeded_runs_are_deterministic():
    cons = _points(random.Random(5), 5)
    a = count_tropical(CONIC, cons, CountOptions(seed=11)).to_json()
    b = count_tropical(CONIC, cons, CountOptions(seed=11)).to_json()
    assert a == b


def test_every_counted_curve_is_matched():
    cons = _points(random.Random(6), 5)
    res = count_tropical(CONIC, cons)
    for c in res.per_curve:
        assert match_type(c.type, res.constraints_used).status is MatchStatus.MATCHED
        assert c.record.contribution >= 1
