"""Match a marked type against affine constraints and audit the result.

Unknowns, in column order: vertex positions ``h(V)`` (``n`` each), one
length ``lambda_E`` per bounded edge, then per marking ``t_i`` followed by
the ``s_i`` coordinates along the constraint's direction basis. Equations:

* ``h(head) - h(tail) - lambda_E * u_E = 0`` for each bounded edge,
* ``h(tail(E_i)) + t_i * u_{E_i} - sum_j s_ij * l_ij = a_i`` per marking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from tropicount._kernels import solve_int
from tropicount.combinatorics import Edge, TropicalType
from tropicount.constraints import AffineConstraint, format_rational, parse_rational
from tropicount.linalg import affine_solve, rank
from tropicount.lp import Ineq, feasible_point


class NoSolutionReason(enum.Enum):
    POSITIVITY = "PositivityFail"
    SEGMENT = "SegmentFail"
    INCONSISTENT = "Inconsistent"


class MatchStatus(enum.Enum):
    MATCHED = "matched"
    NO_SOLUTION = "no_solution"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class CurveSolution:
    type: TropicalType
    vertex_positions: tuple[tuple[Fraction, ...], ...]
    edge_lengths: dict  # bounded edge index -> lambda
    marking_params: tuple[tuple[Fraction, tuple[Fraction, ...]], ...]

    def edge_segment(self, ei: int):
        """``(start, vector, bounded)``: the image is ``start + s*vector``, ``s`` in [0,1] or ``s >= 0``."""
        e = self.type.edges[ei]
        start = self.vertex_positions[e.ends[0]]
        if e.bounded:
            end = self.vertex_positions[e.ends[1]]
            return start, tuple(b - a for a, b in zip(start, end)), True
        return start, tuple(Fraction(x) for x in e.direction), False

    def marked_point(self, i: int) -> tuple[Fraction, ...]:
        ei = self.type.markings[i]
        e = self.type.edges[ei]
        t = self.marking_params[i][0]
        return tuple(p + t * u for p, u in zip(self.vertex_positions[e.ends[0]], e.direction))

    @classmethod
    def from_json(cls, data: dict) -> "CurveSolution":
        verts = [tuple(parse_rational(x) for x in data["vertices"][str(v)]) for v in range(len(data["vertices"]))]
        edges, lengths = [], {}
        for i, e in enumerate(data["edges"]):
            edges.append(Edge(tuple(e["ends"]), int(e["weight"]), tuple(int(x) for x in e["direction"])))
            if len(e["ends"]) == 2:
                lengths[i] = parse_rational(e["length"])
        marks = data.get("markings", [])
        t = TropicalType(len(verts[0]), len(verts), tuple(edges), tuple(m["edge"] for m in marks))
        params = tuple((parse_rational(m["t"]), tuple(parse_rational(x) for x in m["s"])) for m in marks)
        return cls(t, tuple(verts), lengths, params)

    def to_json(self) -> dict:
        return {
            "vertices": {str(v): [format_rational(x) for x in p] for v, p in enumerate(self.vertex_positions)},
            "edges": [
                {
                    "ends": list(e.ends),
                    "weight": e.weight,
                    "direction": list(e.direction),
                    **({"length": format_rational(self.edge_lengths[i])} if e.bounded else {}),
                }
                for i, e in enumerate(self.type.edges)
            ],
            "markings": [
                {"edge": ei, "t": format_rational(t), "s": [format_rational(x) for x in s]}
                for ei, (t, s) in zip(self.type.markings, self.marking_params)
            ],
        }


@dataclass(frozen=True)
class MatchResult:
    status: MatchStatus
    solution: CurveSolution | None = None
    reason: NoSolutionReason | None = None


class Layout:
    """Column bookkeeping for the matching system of one marked type."""

    def __init__(self, t: TropicalType, constraints: Sequence[AffineConstraint]):
        n = t.n
        self.n = n
        self.bounded = t.bounded_edges
        self.lam = {ei: n * t.num_vertices + k for k, ei in enumerate(self.bounded)}
        col = n * t.num_vertices + len(self.bounded)
        self.tcol, self.scol = [], []
        for a in constraints:
            self.tcol.append(col)
            self.scol.append(list(range(col + 1, col + 1 + a.dim)))
            col += 1 + a.dim
        self.ncols = col

    def h(self, v: int, k: int) -> int:
        return self.n * v + k


def matching_system(t: TropicalType, constraints: Sequence[AffineConstraint]):
    """Dense ``(rows, rhs, layout)`` of the matching system."""
    if len(constraints) != t.l:
        raise ValueError(f"{t.l} markings but {len(constraints)} constraints")
    n = t.n
    lay = Layout(t, constraints)
    rows, rhs = [], []
    for ei in lay.bounded:
        e = t.edges[ei]
        a, b = e.ends
        for k in range(n):
            r = [0] * lay.ncols
            r[lay.h(b, k)] = 1
            r[lay.h(a, k)] = -1
            r[lay.lam[ei]] = -e.direction[k]
            rows.append(r)
            rhs.append(Fraction(0))
    for i, (ei, a) in enumerate(zip(t.markings, constraints)):
        e = t.edges[ei]
        v = e.ends[0]
        for k in range(n):
            r = [0] * lay.ncols
            r[lay.h(v, k)] = 1
            r[lay.tcol[i]] = e.direction[k]
            for j, vec in enumerate(a.directions.vectors):
                r[lay.scol[i][j]] = -vec[k]
            rows.append(r)
            rhs.append(a.base[k])
    return rows, rhs, lay


def _region(t: TropicalType, lay: Layout):
    """Rows ``(coeffs, const, strict)`` in the unknowns: lambda > 0 and the t-ranges."""
    out = []
    for ei in lay.bounded:
        out.append(({lay.lam[ei]: 1}, Fraction(0), True, NoSolutionReason.POSITIVITY))
    for i, ei in enumerate(t.markings):
        # a ray meets its constraint behind the vertex: positivity; off a segment: segment
        why = NoSolutionReason.SEGMENT if t.edges[ei].bounded else NoSolutionReason.POSITIVITY
        out.append(({lay.tcol[i]: 1}, Fraction(0), False, why))
        if t.edges[ei].bounded:
            out.append(({lay.lam[ei]: 1, lay.tcol[i]: -1}, Fraction(0), False, NoSolutionReason.SEGMENT))
    return out


def _unpack(t: TropicalType, lay: Layout, x) -> CurveSolution:
    n = t.n
    verts = tuple(tuple(x[lay.h(v, k)] for k in range(n)) for v in range(t.num_vertices))
    lengths = {ei: x[lay.lam[ei]] for ei in lay.bounded}
    params = tuple((x[lay.tcol[i]], tuple(x[c] for c in lay.scol[i])) for i in range(t.l))
    return CurveSolution(t, verts, lengths, params)


def _solve(rows, rhs, ncols: int):
    """``affine_solve`` for integer rows, through the fraction-free kernel."""
    aug = []
    for r, b in zip(rows, rhs):
        b = Fraction(b)
        q = b.denominator
        aug.append([q * a for a in r] + [b.numerator] if q != 1 else list(r) + [b.numerator])
    res = solve_int(aug, ncols)
    if res is None:
        return None
    den, x0, kernel = res
    return [Fraction(v, den) for v in x0], [[Fraction(v) for v in k] for k in kernel]


def match_type(t: TropicalType, constraints: Sequence[AffineConstraint]) -> MatchResult:
    """Solve the matching system of a marked type.

    A singular consistent system is ``DEGENERATE`` only when its solution
    family reaches the region ``lambda > 0`` with the closed t-ranges;
    otherwise no curve of this type exists and the result is a
    ``NO_SOLUTION`` carrying the first violated condition.
    """
    rows, rhs, lay = matching_system(t, constraints)
    sol = _solve(rows, rhs, lay.ncols)
    if sol is None:
        return MatchResult(MatchStatus.NO_SOLUTION, reason=NoSolutionReason.INCONSISTENT)
    x0, kernel = sol
    region = _region(t, lay)
    if not kernel:
        for coeffs, c, strict, why in region:
            v = sum(a * x0[j] for j, a in coeffs.items()) + c
            if v < 0 or (strict and v == 0):
                return MatchResult(MatchStatus.NO_SOLUTION, reason=why)
        return MatchResult(MatchStatus.MATCHED, solution=_unpack(t, lay, x0))
    dim = len(kernel)
    qs = []
    for coeffs, c, strict, _ in region:
        a = tuple(sum(v * kernel[k][j] for j, v in coeffs.items()) for k in range(dim))
        qs.append(Ineq(a, c + sum(v * x0[j] for j, v in coeffs.items()), strict))
    if feasible_point(qs, dim) is not None:
        return MatchResult(MatchStatus.DEGENERATE)
    return MatchResult(MatchStatus.NO_SOLUTION, reason=NoSolutionReason.POSITIVITY)


# ---------------------------------------------------------------- audit

class Violation(enum.Enum):
    TRIVALENCE = "TrivalenceFail"
    VERTEX_ON_CONSTRAINT = "VertexOnConstraint"
    NON_INJECTIVE_VERTICES = "NonInjectiveVertices"
    NON_INJECTIVE_MAP = "NonInjectiveMap"
    MARKED_POINT_AT_VERTEX = "MarkedPointAtVertex"


@dataclass
class GenericityReport:
    violations: list = field(default_factory=list)  # (Violation, witness dict)
    info: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v for v, _ in self.violations}


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _segment_meet(p1, d1, b1, p2, d2, b2):
    """Intersection of ``p1 + s*d1`` and ``p2 + r*d2``.

    Parameters range over [0,1] when bounded, else [0, inf). Returns
    ``None``, ``"point"`` or ``"overlap"`` (positive length).
    """
    n = len(p1)
    w = _sub(p2, p1)
    if not any(d1):
        # a degenerate piece is the single point p1
        if not any(d2):
            return None if any(w) else "point"
        return "point" if _segment_meet(p2, d2, b2, p1, d1, b1) else None
    if rank([list(d1), list(d2)]) == 2:
        # s*d1 - r*d2 = w
        sol = affine_solve([[d1[k], -d2[k]] for k in range(n)], list(w), 2)
        if sol is None:
            return None
        (s, r), _ = sol
        if s < 0 or r < 0 or (b1 and s > 1) or (b2 and r > 1):
            return None
        return "point"
    if rank([list(d1), list(w)]) > 1:
        return None
    # collinear: express the second piece in the first one's parameter
    k = next(i for i in range(n) if d1[i])
    r0 = w[k] / d1[k]
    step = d2[k] / d1[k]
    lo2, hi2 = (r0, r0 + step) if b2 else (r0, None)
    if step < 0:
        lo2, hi2 = (r0 + step, r0) if b2 else (None, r0)
    lo1, hi1 = Fraction(0), (Fraction(1) if b1 else None)
    lo = max(x for x in (lo1, lo2) if x is not None)
    his = [x for x in (hi1, hi2) if x is not None]
    hi = min(his) if his else None
    if hi is None:
        return "overlap"
    if lo > hi:
        return None
    return "overlap" if lo < hi else "point"


def genericity_audit(s: CurveSolution, constraints: Sequence[AffineConstraint]) -> GenericityReport:
    t = s.type
    rep = GenericityReport()
    for ei, lam in s.edge_lengths.items():
        if lam <= 0:
            rep.violations.append((Violation.TRIVALENCE, {"edge": ei, "length": lam}))
    for v in range(t.num_vertices):
        if t.valence(v) != 3:
            rep.violations.append((Violation.TRIVALENCE, {"vertex": v, "valence": t.valence(v)}))
    for v, p in enumerate(s.vertex_positions):
        for i, a in enumerate(constraints):
            if a.contains(p):
                rep.violations.append((Violation.VERTEX_ON_CONSTRAINT, {"vertex": v, "constraint": i}))
    for i, ei in enumerate(t.markings):
        tval = s.marking_params[i][0]
        e = t.edges[ei]
        if tval == 0 or (e.bounded and tval == s.edge_lengths[ei]):
            rep.violations.append((Violation.MARKED_POINT_AT_VERTEX, {"marking": i, "edge": ei}))
    pos = s.vertex_positions
    for v in range(len(pos)):
        for w in range(v + 1, len(pos)):
            if pos[v] == pos[w]:
                rep.violations.append((Violation.NON_INJECTIVE_VERTICES, {"vertices": (v, w)}))
    segs = [s.edge_segment(ei) for ei in range(len(t.edges))]
    for i in range(len(t.edges)):
        for j in range(i + 1, len(t.edges)):
            shared = set(t.edges[i].ends) & set(t.edges[j].ends)
            meet = _segment_meet(*segs[i], *segs[j])
            if meet is None:
                continue
            if shared:
                if meet == "overlap":
                    rep.violations.append((Violation.NON_INJECTIVE_MAP, {"edges": (i, j), "kind": "overlap"}))
                continue
            if meet == "overlap" or t.n > 2:
                rep.violations.append((Violation.NON_INJECTIVE_MAP, {"edges": (i, j), "kind": meet}))
            else:
                rep.info.append(("crossing", {"edges": (i, j)}))
    return rep
