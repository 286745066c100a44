"""Polyhedral decompositions of Q^n in H-representation.

Cells are finite intersections of half-spaces ``<m, x> >= c``. Faces are
identified by sets of inequalities made tight; no vertex enumeration is
done except for 0-cells in :func:`integral_rescale`. All tests are exact LP
feasibility questions answered by :mod:`tropicount.lp`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from tropicount.constraints import format_rational, parse_rational
from tropicount.linalg import affine_solve, rank
from tropicount.lp import Ineq, feasible_point, fm_eliminate, implicit_equalities, is_feasible, remove_redundant


class EmptyPolyhedron(ValueError):
    pass


class IncompleteComplex(ValueError):
    pass


class RayNotInFan(ValueError):
    pass


def _normal_form(m: Sequence, c) -> tuple[tuple[int, ...], int] | bool:
    """Scale ``<m,x> >= c`` to a primitive integer row; tautology/contradiction as a bool."""
    m = [Fraction(x) for x in m]
    c = Fraction(c)
    if not any(m):
        return c <= 0
    den = lcm(*(x.denominator for x in m), c.denominator)
    mi = [int(x * den) for x in m]
    ci = int(c * den)
    g = gcd(*mi, ci)
    return tuple(x // g for x in mi), ci // g


def _to_lp(rows, strict: bool = False) -> list[Ineq]:
    return [Ineq(tuple(Fraction(x) for x in m), Fraction(-c), strict) for m, c in rows]


class HPolyhedron:
    """Nonempty polyhedron ``{x : <m_i, x> >= c_i}`` with an irredundant row list."""

    def __init__(self, n: int, inequalities: Iterable = (), *, _trusted: bool = False):
        self.n = n
        if _trusted:
            self.ineqs = tuple(inequalities)
            return
        rows = set()
        for m, c in inequalities:
            if len(m) != n:
                raise ValueError(f"covector {m} does not live in rank {n}")
            r = _normal_form(m, c)
            if r is False:
                raise EmptyPolyhedron("contradictory inequality")
            if r is not True:
                rows.add(r)
        rows = sorted(rows)
        red = remove_redundant(_to_lp(rows), n) if rows else []
        if red is None:
            raise EmptyPolyhedron("no point satisfies the inequalities")
        out = []
        for q in red:
            r = _normal_form(q.a, -q.c)
            out.append(r)
        self.ineqs = tuple(sorted(out))

    @classmethod
    def whole(cls, n: int) -> "HPolyhedron":
        return cls(n, (), _trusted=True)

    def lp(self, strict: bool = False) -> list[Ineq]:
        return _to_lp(self.ineqs, strict)

    # -- geometry
    def dim(self) -> int:
        qs = self.lp()
        eq = implicit_equalities(qs, self.n)
        return self.n - (rank([list(self.ineqs[i][0]) for i in eq]) if eq else 0)

    def is_full_dimensional(self) -> bool:
        return not self.ineqs or is_feasible(self.lp(strict=True), self.n)

    def lineality_rank(self) -> int:
        return self.n - (rank([list(m) for m, _ in self.ineqs]) if self.ineqs else 0)

    def strongly_convex(self) -> bool:
        return self.lineality_rank() == 0

    def contains_point(self, x: Sequence) -> bool:
        x = [parse_rational(v) for v in x]
        return all(sum(a * b for a, b in zip(m, x)) >= c for m, c in self.ineqs)

    def active(self, x: Sequence) -> frozenset[int]:
        x = [parse_rational(v) for v in x]
        return frozenset(i for i, (m, c) in enumerate(self.ineqs) if sum(a * b for a, b in zip(m, x)) == c)

    def face(self, tight: Iterable[int]) -> "HPolyhedron":
        rows = list(self.ineqs)
        for i in tight:
            m, c = self.ineqs[i]
            rows.append((tuple(-x for x in m), -c))
        return HPolyhedron(self.n, rows)

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron | None":
        try:
            return HPolyhedron(self.n, self.ineqs + other.ineqs)
        except EmptyPolyhedron:
            return None

    def relative_interior_point(self) -> list[Fraction]:
        qs = self.lp()
        eq = set(implicit_equalities(qs, self.n))
        rows = []
        for i, q in enumerate(qs):
            if i in eq:
                rows.append(q)
                rows.append(Ineq(tuple(-v for v in q.a), -q.c))
            else:
                rows.append(Ineq(q.a, q.c, True))
        x = feasible_point(rows, self.n)
        assert x is not None
        return x

    def subset_of(self, other: "HPolyhedron") -> bool:
        base = self.lp()
        for m, c in other.ineqs:
            # self meets <m,x> < c ?
            if is_feasible(base + [Ineq(tuple(Fraction(-v) for v in m), Fraction(c), True)], self.n):
                return False
        return True

    def same_set(self, other: "HPolyhedron") -> bool:
        return self.n == other.n and self.subset_of(other) and other.subset_of(self)

    def translate(self, v: Sequence) -> "HPolyhedron":
        v = [parse_rational(x) for x in v]
        return HPolyhedron(self.n, [(m, c + sum(a * b for a, b in zip(m, v))) for m, c in self.ineqs])

    def scale(self, a) -> "HPolyhedron":
        a = Fraction(a)
        if a <= 0:
            raise ValueError("scale factor must be positive")
        return HPolyhedron(self.n, [(m, c * a) for m, c in self.ineqs])

    def to_json(self) -> dict:
        return {"ineqs": [{"m": [format_rational(x) for x in m], "c": format_rational(c)} for m, c in self.ineqs]}

    @classmethod
    def from_json(cls, n: int, data: dict) -> "HPolyhedron":
        return cls(n, [([parse_rational(x) for x in q["m"]], parse_rational(q["c"])) for q in data["ineqs"]])

    def __repr__(self) -> str:
        return f"HPolyhedron({self.n}, {list(self.ineqs)})"


class Cone(HPolyhedron):
    """Polyhedral cone: every right-hand side is zero."""

    def __init__(self, n: int, covectors: Iterable = (), *, _trusted: bool = False):
        if _trusted:
            super().__init__(n, covectors, _trusted=True)
            return
        super().__init__(n, [(m, 0) for m in covectors])

    @classmethod
    def from_polyhedron(cls, p: HPolyhedron) -> "Cone":
        assert all(c == 0 for _, c in p.ineqs)
        return cls(n=p.n, covectors=p.ineqs, _trusted=True)

    @property
    def covectors(self) -> list[tuple[int, ...]]:
        return [m for m, _ in self.ineqs]

    def contains_vector(self, v: Sequence) -> bool:
        return self.contains_point(v)


def asymptotic_cone(xi: HPolyhedron) -> Cone:
    return Cone(xi.n, [m for m, _ in xi.ineqs])


def cone_over_cell(xi: HPolyhedron) -> Cone:
    """``{(x, b) : b >= 0, <m_i, x> - b c_i >= 0}`` in rank ``n + 1``."""
    rows = [tuple(m) + (-c,) for m, c in xi.ineqs]
    rows.append((0,) * xi.n + (1,))
    return Cone(xi.n + 1, rows)


# ---------------------------------------------------------------- complexes

@dataclass
class PolyhedralComplex:
    n: int
    maximal_cells: list[HPolyhedron]

    def to_json(self) -> dict:
        return {"n": self.n, "cells": [c.to_json() for c in self.maximal_cells]}

    @classmethod
    def from_json(cls, data: dict) -> "PolyhedralComplex":
        n = data["n"]
        return cls(n, [HPolyhedron.from_json(n, c) for c in data["cells"]])

    def translate(self, v: Sequence) -> "PolyhedralComplex":
        return PolyhedralComplex(self.n, [c.translate(v) for c in self.maximal_cells])


@dataclass
class Fan:
    n: int
    maximal_cones: list[Cone]

    def as_complex(self) -> PolyhedralComplex:
        return PolyhedralComplex(self.n, list(self.maximal_cones))

    def translate(self, v: Sequence) -> PolyhedralComplex:
        return self.as_complex().translate(v)

    def same_cones(self, other: "Fan") -> bool:
        if self.n != other.n or len(self.maximal_cones) != len(other.maximal_cones):
            return False
        left = list(other.maximal_cones)
        for c in self.maximal_cones:
            hit = next((i for i, d in enumerate(left) if c.same_set(d)), None)
            if hit is None:
                return False
            left.pop(hit)
        return True

    def negated(self) -> "Fan":
        return Fan(self.n, [Cone(self.n, [tuple(-x for x in m) for m in c.covectors]) for c in self.maximal_cones])

    def has_ray(self, v: Sequence) -> bool:
        """Whether ``Q_{>=0} v`` is a one-dimensional cone of the fan."""
        u = [parse_rational(x) for x in v]
        for c in self.maximal_cones:
            if c.contains_vector(u):
                f = c.face(c.active(u))
                return f.dim() == 1
        return False

    @classmethod
    def from_rays(cls, n: int, cones: Sequence[Sequence[Sequence[int]]]) -> "Fan":
        """Fan from full-dimensional simplicial cones given by ``n`` generators each."""
        out = []
        for gens in cones:
            rows = []
            for k in range(n):
                others = [g for j, g in enumerate(gens) if j != k]
                # normal to the other generators, oriented towards gens[k]
                sol = affine_solve([list(g) for g in others], [0] * len(others), n) if others else None
                normal = sol[1][0] if sol else [Fraction(int(i == 0)) for i in range(n)]
                if sum(a * b for a, b in zip(normal, gens[k])) < 0:
                    normal = [-x for x in normal]
                rows.append(normal)
            out.append(Cone(n, rows))
        return cls(n, out)


def fan_of_projective_plane() -> Fan:
    return Fan.from_rays(2, [[(1, 0), (0, 1)], [(0, 1), (-1, -1)], [(-1, -1), (1, 0)]])


def fan_of_p1_times_p1() -> Fan:
    return Fan.from_rays(2, [[(1, 0), (0, 1)], [(0, 1), (-1, 0)], [(-1, 0), (0, -1)], [(0, -1), (1, 0)]])


def fan_of_projective_space(n: int) -> Fan:
    rays = [tuple(int(i == k) for i in range(n)) for k in range(n)] + [tuple([-1] * n)]
    return Fan.from_rays(n, [[r for j, r in enumerate(rays) if j != skip] for skip in range(n + 1)])


def single_cell(n: int) -> PolyhedralComplex:
    return PolyhedralComplex(n, [HPolyhedron.whole(n)])


# ---------------------------------------------------------------- checks

@dataclass
class CheckReport:
    ok: bool
    problems: list


def check_complex(p: PolyhedralComplex, require_complete: bool = True) -> CheckReport:
    """Face-to-face intersections, strong convexity and (optionally) completeness."""
    problems = []
    cells = p.maximal_cells
    for i, c in enumerate(cells):
        if not c.strongly_convex():
            problems.append(("not strongly convex", i))
        if not c.is_full_dimensional():
            problems.append(("maximal cell not full-dimensional", i))
    for i, j in itertools.combinations(range(len(cells)), 2):
        inter = cells[i].intersect(cells[j])
        if inter is None:
            continue
        if inter.is_full_dimensional():
            problems.append(("overlapping cells", i, j))
            continue
        x = inter.relative_interior_point()
        for k in (i, j):
            f = cells[k].face(cells[k].active(x))
            if not f.same_set(inter):
                problems.append(("intersection is not a face", i, j, k))
    if require_complete:
        problems.extend(_unshared_facets(p))
    return CheckReport(not problems, problems)


def _unshared_facets(p: PolyhedralComplex) -> list:
    out = []
    n = p.n
    for i, c in enumerate(p.maximal_cells):
        for r in range(len(c.ineqs)):
            facet = c.face([r])
            shared = 0
            for j, d in enumerate(p.maximal_cells):
                if j == i:
                    continue
                inter = facet.intersect(d)
                if inter is not None and inter.dim() == n - 1:
                    shared += 1
            if shared != 1:
                out.append(("facet shared by %d other cells" % shared, i, r))
    return out


def is_complete(p: PolyhedralComplex) -> bool:
    return not _unshared_facets(p)


def asymptotic_fan(p: PolyhedralComplex) -> Fan:
    if not is_complete(p):
        raise IncompleteComplex("complex does not cover Q^n")
    cones: list[Cone] = []
    for c in p.maximal_cells:
        a = asymptotic_cone(c)
        if not a.is_full_dimensional():
            continue
        if not any(a.same_set(b) for b in cones):
            cones.append(a)
    fan = Fan(p.n, cones)
    assert is_complete(fan.as_complex()), "asymptotic fan of a complete complex is complete"
    return fan


def common_refinement(p1: PolyhedralComplex, p2: PolyhedralComplex) -> PolyhedralComplex:
    if not is_complete(p1) or not is_complete(p2):
        raise IncompleteComplex("both complexes must be complete")
    return _refine(p1, p2)


def _refine(p1: PolyhedralComplex, p2: PolyhedralComplex) -> PolyhedralComplex:
    cells = []
    for a in p1.maximal_cells:
        for b in p2.maximal_cells:
            rows = a.ineqs + b.ineqs
            if rows and not is_feasible(_to_lp(rows, strict=True), p1.n):
                continue
            cells.append(HPolyhedron(p1.n, rows))
    return PolyhedralComplex(p1.n, cells)


# ---------------------------------------------------------------- construction

def _strip(v1, d, tau: Cone) -> HPolyhedron:
    """``{v1 + s d + y : s in [0,1], y in tau}`` by eliminating ``s``."""
    n = len(v1)
    qs = []
    for m in tau.covectors:
        # <m, x - v1> - s <m, d> >= 0 in the variables (x, s)
        md = sum(a * b for a, b in zip(m, d))
        mv = sum(a * b for a, b in zip(m, v1))
        qs.append(Ineq(tuple(Fraction(a) for a in m) + (Fraction(-md),), Fraction(-mv)))
    qs.append(Ineq((Fraction(0),) * n + (Fraction(1),), Fraction(0)))
    qs.append(Ineq((Fraction(0),) * n + (Fraction(-1),), Fraction(1)))
    proj = fm_eliminate(qs, n)
    return HPolyhedron(n, [(q.a[:n], -q.c) for q in proj])


def edge_decomposition(sigma: Fan, v1: Sequence, v2: Sequence) -> PolyhedralComplex:
    """Complete complex with asymptotic fan ``sigma`` containing ``[v1, v2]`` in its 1-skeleton.

    Cones containing the edge direction form the region ``B1``; the other
    maximal cones form ``B2``. Cells: ``v1 + sigma`` for ``sigma`` in ``B2``,
    ``v2 + sigma`` for ``sigma`` in ``B1`` and the strips ``[v1,v2] + tau``
    over the common facets ``tau`` of the two regions.
    """
    v1 = [parse_rational(x) for x in v1]
    v2 = [parse_rational(x) for x in v2]
    d = [b - a for a, b in zip(v1, v2)]
    if not any(d):
        raise ValueError("edge endpoints coincide")
    b1 = [c for c in sigma.maximal_cones if c.contains_vector(d)]
    b2 = [c for c in sigma.maximal_cones if not c.contains_vector(d)]
    if not b1:
        raise RayNotInFan(f"no cone of the fan contains the direction {d}")
    cells = [c.translate(v1) for c in b2] + [c.translate(v2) for c in b1]
    seen: list[Cone] = []
    for c in b1:
        for r in range(len(c.ineqs)):
            tau = c.face([r])
            if any(tau.same_set(t) for t in seen):
                continue
            for c2 in b2:
                inter = tau.intersect(c2)
                if inter is not None and inter.dim() == sigma.n - 1:
                    seen.append(Cone.from_polyhedron(tau))
                    break
    cells += [_strip(v1, d, tau) for tau in seen]
    return PolyhedralComplex(sigma.n, cells)


def star_decomposition(sigma: Fan, p: Sequence) -> PolyhedralComplex:
    return sigma.translate(p)


def adapted_decomposition(curves: Sequence, sigma: Fan, extra_points: Sequence = ()) -> PolyhedralComplex:
    """Common refinement of edge decompositions and stars at vertices and extra points."""
    parts = []
    for s in curves:
        t = s.type
        for ei, e in enumerate(t.edges):
            start, vec, bounded = s.edge_segment(ei)
            if bounded:
                parts.append(edge_decomposition(sigma, start, [a + b for a, b in zip(start, vec)]))
            else:
                if not sigma.has_ray(e.direction):
                    raise RayNotInFan(f"unbounded direction {e.direction} is not a ray of the fan")
                parts.append(star_decomposition(sigma, start))
        for p in s.vertex_positions:
            parts.append(star_decomposition(sigma, p))
    for p in extra_points:
        parts.append(star_decomposition(sigma, p))
    out = parts[0] if parts else single_cell(sigma.n)
    if not is_complete(sigma.as_complex()):
        raise IncompleteComplex("the fan is not complete")
    for q in parts[1:]:
        out = _refine(out, q)
    return out


def zero_cells(p: PolyhedralComplex) -> list[tuple[Fraction, ...]]:
    out = set()
    n = p.n
    for c in p.maximal_cells:
        for sub in itertools.combinations(range(len(c.ineqs)), n):
            rows = [list(c.ineqs[i][0]) for i in sub]
            if rank(rows) < n:
                continue
            sol = affine_solve(rows, [c.ineqs[i][1] for i in sub], n)
            if sol is not None and c.contains_point(sol[0]):
                out.add(tuple(sol[0]))
    return sorted(out)


def contains_in_one_skeleton(p: PolyhedralComplex, start: Sequence, vec: Sequence, bounded: bool = True) -> bool:
    """Whether ``start + s*vec`` (``s`` in [0,1], or ``s >= 0``) lies in the union of faces of dim <= 1.

    The piece is cut at every crossing with a cell hyperplane; each cut point
    and each midpoint between cuts must sit in a face of dimension at most 1.
    """
    start = [parse_rational(x) for x in start]
    vec = [parse_rational(x) for x in vec]
    params = {Fraction(0)}
    if bounded:
        params.add(Fraction(1))
    for c in p.maximal_cells:
        for m, rhs in c.ineqs:
            mv = sum(a * b for a, b in zip(m, vec))
            if mv:
                s = (rhs - sum(a * b for a, b in zip(m, start))) / mv
                if s >= 0 and (not bounded or s <= 1):
                    params.add(s)
    ps = sorted(params)
    samples = list(ps) + [(a + b) / 2 for a, b in zip(ps, ps[1:])]
    if not bounded:
        samples.append(ps[-1] + 1)
    for s in samples:
        x = [a + s * b for a, b in zip(start, vec)]
        if not _in_low_face(p, x):
            return False
    return True


def _in_low_face(p: PolyhedralComplex, x) -> bool:
    for c in p.maximal_cells:
        if c.contains_point(x):
            if c.face(c.active(x)).dim() <= 1:
                return True
    return False


def star_fan(p: PolyhedralComplex, x: Sequence) -> Fan:
    """Fan of tangent cones of the cells through ``x``."""
    x = [parse_rational(v) for v in x]
    cones = []
    for c in p.maximal_cells:
        if c.contains_point(x):
            act = c.active(x)
            cones.append(Cone(p.n, [c.ineqs[i][0] for i in sorted(act)]))
    return Fan(p.n, cones)


def integral_rescale(p: PolyhedralComplex, curves: Sequence = ()) -> int:
    """Least ``k`` with integral 0-cells and bounded-edge lattice lengths divisible by the weights."""
    k = 1
    for v in zero_cells(p):
        for x in v:
            k = lcm(k, Fraction(x).denominator)
    for s in curves:
        for ei, lam in s.edge_lengths.items():
            w = s.type.edges[ei].weight
            k = lcm(k, (Fraction(lam) / w).denominator)
    return k
