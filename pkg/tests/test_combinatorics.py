from __future__ import annotations

import itertools
from collections import Counter

import pytest

from tropicount.combinatorics import (
    CodimensionMismatch,
    ContractedEdge,
    Degree,
    InvalidDegree,
    TooFewLeaves,
    automorphisms,
    brute_force_types,
    canonical_form,
    derive_type,
    enumerate_leaf_trees,
    enumerate_marked_types,
    enumerate_types,
    explicit_isomorphism,
    validate_degree,
)

LINE = Degree.from_mapping(2, {(-1, 0): 1, (0, -1): 1, (1, 1): 1})
CONIC = Degree.from_mapping(2, {(-1, 0): 2, (0, -1): 2, (1, 1): 2})
CUBIC = Degree.from_mapping(2, {(-1, 0): 3, (0, -1): 3, (1, 1): 3})
QUADRIC = Degree.from_mapping(3, {(-1, 0, 0): 2, (0, -1, 0): 2, (0, 0, -1): 2, (1, 1, 1): 2})


def test_validate_degree():
    validate_degree(Degree.from_mapping(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1}))
    validate_degree(QUADRIC)
    with pytest.raises(InvalidDegree) as exc:
        validate_degree(Degree.from_mapping(2, {(1, 0): 1, (0, 1): 1}))
    assert "(1, 1)" in str(exc.value)
    with pytest.raises(InvalidDegree):
        validate_degree(Degree.from_mapping(2, {}))
    with pytest.raises(InvalidDegree):
        validate_degree(Degree.from_mapping(2, {(0, 0): 1}))


def test_degree_json_round_trip():
    assert Degree.from_json(QUADRIC.to_json()) == QUADRIC
    assert QUADRIC.e == 8


@pytest.mark.parametrize("e,count", [(3, 1), (4, 3), (5, 15), (6, 105), (7, 945)])
def test_leaf_tree_counts(e, count):
    trees = enumerate_leaf_trees(e)
    assert len(trees) == count
    assert len({frozenset(frozenset(x) for x in t.edges) for t in trees}) == count


def test_leaf_trees_need_three_leaves():
    with pytest.raises(TooFewLeaves):
        enumerate_leaf_trees(2)


def test_derive_type_single_vertex():
    (tree,) = enumerate_leaf_trees(3)
    t = derive_type(tree, [(-1, 0), (0, -1), (1, 1)])
    assert t.num_vertices == 1 and t.bounded_edges == []
    assert t.check_balancing() and t.genus == 0


def _split(trees, left):
    # the tree whose bounded edge separates leaves `left` from the rest
    for t in trees:
        nb = {}
        for a, b in t.edges:
            nb.setdefault(a, set()).add(b)
            nb.setdefault(b, set()).add(a)
        for x in range(4, 6):
            if {y for y in nb[x] if y < 4} == set(left):
                return t
    raise AssertionError


def test_derive_type_rejects_contracted_edge():
    tree = _split(enumerate_leaf_trees(4), {0, 1})
    with pytest.raises(ContractedEdge):
        derive_type(tree, [(-1, 0), (1, 0), (-1, 0), (1, 0)])


def test_derive_type_bounded_edge_direction():
    tree = _split(enumerate_leaf_trees(4), {0, 1})
    t = derive_type(tree, [(-1, 0), (0, -1), (1, 0), (0, 1)])
    (bi,) = t.bounded_edges
    e = t.edges[bi]
    assert e.weight == 1
    # the flag leaving the side carrying leaves 0 and 1 points along (1, 1)
    side = t.edges[0].ends[0]
    assert t.flag_direction(side, bi) == (1, 1)


def test_plane_type_counts_match_brute_force():
    assert len(enumerate_types(LINE)) == 1
    fast = enumerate_types(CONIC)
    slow = brute_force_types(CONIC)
    assert {t.code() for t in fast} == {t.code() for t in slow}
    assert len(fast) == 17


def test_plane_cubic_type_count():
    types = enumerate_types(CUBIC)
    assert len(types) == 791
    assert len({t.code() for t in types}) == 791
    assert all(t.check_balancing() and t.genus == 0 and t.overvalence == 0 for t in types)
    assert all(t.degree == CUBIC for t in types)


def _cherries(t):
    """Vertices where two equal unbounded ends meet."""
    out = 0
    for v in range(t.num_vertices):
        ends = Counter(t.edges[i].weighted for i in t.incident(v) if not t.edges[i].bounded)
        out += any(c == 2 for c in ends.values())
    return out


def test_quadric_types_include_four_cherry_shape():
    types = enumerate_types(QUADRIC)
    assert all(t.num_vertices == 6 for t in types)
    assert any(_cherries(t) == 4 for t in types)


def test_canonical_form_properties():
    (tree,) = enumerate_leaf_trees(3)
    a = derive_type(tree, [(-1, 0), (0, -1), (1, 1)])
    b = derive_type(tree, [(1, 1), (-1, 0), (0, -1)])
    assert canonical_form(a) == canonical_form(b)
    assert explicit_isomorphism(a, b)
    c = derive_type(tree, [(1, 0), (0, 1), (-1, -1)])
    assert canonical_form(a) != canonical_form(c)
    assert canonical_form(a) != canonical_form(a.with_markings((0,)))


def test_codes_agree_with_explicit_isomorphism():
    types = brute_force_types(CONIC)
    for s, t in itertools.combinations(types[:10], 2):
        assert not explicit_isomorphism(s, t)
    for t in types:
        perm = t.edges[::-1]
        u = type(t)(t.n, t.num_vertices, perm)
        assert explicit_isomorphism(t, u) and u.code() == t.code()


def test_automorphisms_of_symmetric_type():
    (line,) = enumerate_types(LINE)
    assert automorphisms(line) == [(0, 1, 2)]
    doubled = [t for t in enumerate_types(CONIC) if len(automorphisms(t)) > 1]
    assert doubled


def test_marked_types_of_the_line():
    marked = enumerate_marked_types(LINE, 2, [1, 1])
    # ordered pairs of distinct ends; a repeated end is pruned (distance -1 < 0)
    assert len(marked) == 6
    assert {frozenset(t.markings) for t in marked} == {frozenset(p) for p in itertools.combinations(range(3), 2)}


def test_marked_types_codimension_checks():
    with pytest.raises(CodimensionMismatch):
        enumerate_marked_types(LINE, 3, [1, 1, 1])
    with pytest.raises(CodimensionMismatch):
        enumerate_marked_types(LINE, 2, [1])


def test_marked_conic_count_is_automorphism_free():
    marked = enumerate_marked_types(CONIC, 5, [1] * 5)
    codes = [t.code() for t in marked]
    assert len(codes) == len(set(codes))
