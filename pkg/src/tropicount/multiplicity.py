"""Per-curve multiplicities and the plane-curve oracles."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb, prod
from typing import Callable, Sequence

from tropicount.assembly import candidate_types
from tropicount.combinatorics import Degree, TropicalType, enumerate_marked_types, validate_degree
from tropicount.constraints import AffineConstraint, random_generic_translation, validate_constraints
from tropicount.linalg import INFINITE, cokernel_order, det, lattice_basis, lattice_index, saturate
from tropicount.solver import CurveSolution, MatchStatus, genericity_audit, match_type


class InfiniteIndex(ArithmeticError):
    pass


class WrongDimension(ValueError):
    pass


@dataclass(frozen=True)
class MultiplicityRecord:
    marked_weight: int
    D_index: int
    deltas: tuple[int, ...]

    @property
    def D_tilde(self) -> int:
        return self.D_index * prod(self.deltas)

    @property
    def contribution(self) -> int:
        return self.marked_weight * self.D_tilde


def total_marked_weight(t: TropicalType) -> int:
    """Product of bounded-edge weights times the weights of the marked edges."""
    return t.inner_weight * prod(t.edges[ei].weight for ei in t.markings)


def lattice_map_matrix(t: TropicalType, constraints: Sequence[AffineConstraint]) -> list[list[int]]:
    """Presentation matrix of the cokernel of the integral matching map.

    Row blocks of size ``n``: one per bounded edge, then one per marking.
    Columns: the images of the standard basis of ``Z^(n*V)``, then the
    relation columns ``u_E`` per bounded edge and a basis of the saturation
    of ``Z u_i + L(A_i)`` per marking.
    """
    n = t.n
    bounded = t.bounded_edges
    nrows = n * (len(bounded) + t.l)
    cols = []
    for v in range(t.num_vertices):
        for k in range(n):
            col = [0] * nrows
            for b, ei in enumerate(bounded):
                tail, head = t.edges[ei].ends
                if head == v:
                    col[n * b + k] += 1
                if tail == v:
                    col[n * b + k] -= 1
            for i, ei in enumerate(t.markings):
                if t.edges[ei].ends[0] == v:
                    col[n * (len(bounded) + i) + k] += 1
            cols.append(col)
    for b, ei in enumerate(bounded):
        col = [0] * nrows
        for k, x in enumerate(t.edges[ei].direction):
            col[n * b + k] = x
        cols.append(col)
    for i, (ei, a) in enumerate(zip(t.markings, constraints)):
        gens = [t.edges[ei].direction, *a.directions.vectors]
        for vec in saturate(gens, n).vectors:
            col = [0] * nrows
            for k, x in enumerate(vec):
                col[n * (len(bounded) + i) + k] = x
            cols.append(col)
    return [[c[r] for c in cols] for r in range(nrows)]


def curve_index_D(t: TropicalType, constraints: Sequence[AffineConstraint]) -> int:
    m = lattice_map_matrix(t, constraints)
    order = cokernel_order(m, len(m))
    if order is INFINITE:
        raise InfiniteIndex("integral matching map has infinite cokernel")
    return order


def delta_indices(t: TropicalType, constraints: Sequence[AffineConstraint]) -> tuple[int, ...]:
    out = []
    for ei, a in zip(t.markings, constraints):
        gens = [t.edges[ei].direction, *a.directions.vectors]
        sub = lattice_basis(gens, t.n)
        if sub.rank != a.dim + 1:
            raise InfiniteIndex("marked edge is parallel to its constraint")
        out.append(lattice_index(sub, saturate(gens, t.n)))
    return tuple(out)


def multiplicity_record(t: TropicalType, constraints: Sequence[AffineConstraint]) -> MultiplicityRecord:
    return MultiplicityRecord(total_marked_weight(t), curve_index_D(t, constraints), delta_indices(t, constraints))


# ---------------------------------------------------------------- plane checks

def mikhalkin_vertex_mult(t: TropicalType, v: int) -> int:
    if t.n != 2:
        raise WrongDimension(f"vertex multiplicity needs n = 2, got {t.n}")
    inc = t.incident(v)
    if len(inc) != 3:
        raise ValueError(f"vertex {v} is not trivalent")
    vals = set()
    for a in range(3):
        for b in range(a + 1, 3):
            e1, e2 = inc[a], inc[b]
            u1, u2 = t.flag_direction(v, e1), t.flag_direction(v, e2)
            vals.add(t.edges[e1].weight * t.edges[e2].weight * abs(det([list(u1), list(u2)])))
    assert len(vals) == 1, "balancing makes the three pairs agree"
    return vals.pop()


@dataclass(frozen=True)
class Equivalence:
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def check_2d_equivalence(t: TropicalType, constraints: Sequence[AffineConstraint]) -> Equivalence:
    """Inner weight times the lattice index against the product of vertex multiplicities."""
    if t.n != 2:
        raise WrongDimension(f"plane check needs n = 2, got {t.n}")
    lhs = t.inner_weight * curve_index_D(t, constraints)
    rhs = prod(mikhalkin_vertex_mult(t, v) for v in range(t.num_vertices))
    return Equivalence(lhs, rhs)


def kontsevich_oracle(dmax: int) -> list[int]:
    """Rational plane curve counts ``N_1..N_dmax`` through ``3d-1`` points."""
    if dmax < 1:
        raise ValueError("dmax must be at least 1")
    N = [0, 1]
    for d in range(2, dmax + 1):
        total = 0
        for a in range(1, d):
            b = d - a
            total += N[a] * N[b] * (
                a * a * b * b * comb(3 * d - 4, 3 * a - 2) - a ** 3 * b * comb(3 * d - 4, 3 * a - 1)
            )
        N.append(total)
    return N[1:]


# ---------------------------------------------------------------- the count

class NonGenericConstraints(RuntimeError):
    def __init__(self, message: str, findings: list):
        super().__init__(message)
        self.findings = findings


def _default_retries() -> int:
    return int(os.environ.get("TROPICOUNT_MAX_RETRIES", "8"))


@dataclass
class CountOptions:
    """``seed=None`` keeps the given constraints on the first attempt; an
    integer seed translates them on every attempt."""

    seed: int | None = None
    box: int = 10_000
    denominator: int = 1
    allow_resample: bool = True
    max_retries: int = field(default_factory=_default_retries)
    threads: int = 1
    strict_audit: bool = True
    progress: Callable | None = None


@dataclass(frozen=True)
class CurveRecord:
    type: TropicalType
    solution: CurveSolution
    record: MultiplicityRecord
    warnings: tuple = ()

    def to_json(self) -> dict:
        sol = self.solution.to_json()
        return {
            "code": self.type.code().decode(),
            "w": self.record.marked_weight,
            "D": self.record.D_index,
            "deltas": list(self.record.deltas),
            "contribution": self.record.contribution,
            "vertices": sol["vertices"],
            "edges": sol["edges"],
            "markings": sol["markings"],
            **({"warnings": list(self.warnings)} if self.warnings else {}),
        }


@dataclass
class CountResult:
    total: int
    per_curve: list[CurveRecord]
    constraints_used: list[AffineConstraint]
    attempts: int = 1

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "curves": [c.to_json() for c in self.per_curve],
            "constraints_used": [a.to_json() for a in self.constraints_used],
            "attempts": self.attempts,
        }


def eliminated_size(t: TropicalType, constraints: Sequence[AffineConstraint]) -> tuple[int, int]:
    """``(equations, unknowns)`` after eliminating lengths and marking parameters."""
    rows = (t.n - 1) * len(t.bounded_edges) + sum(a.codim for a in constraints)
    return rows, t.n * t.num_vertices


def _attempt_constraints(constraints, opts: CountOptions, attempt: int):
    if opts.seed is None and attempt == 0:
        return list(constraints)
    seed = (0 if opts.seed is None else opts.seed) * 1_000_003 + attempt
    return random_generic_translation(constraints, seed, opts.box, opts.denominator)


def _evaluate(t: TropicalType, constraints):
    """``(CurveRecord | None, findings)`` for one candidate type."""
    size = eliminated_size(t, constraints)
    assert size[0] == size[1] == t.n * (t.e - 2), f"eliminated system is {size}, not square of size n(e-2)"
    r = match_type(t, constraints)
    if r.status is MatchStatus.DEGENERATE:
        return None, [("Degenerate", t.code().decode())]
    if r.status is MatchStatus.NO_SOLUTION:
        # assembly allowed lambda = 0; a candidate that only works there has a contracted edge
        return None, [("TrivalenceFail", t.code().decode())]
    rep = genericity_audit(r.solution, constraints)
    findings = [(v.value, w) for v, w in rep.violations]
    try:
        rec = multiplicity_record(t, constraints)
    except InfiniteIndex as exc:
        return None, findings + [("InfiniteIndex", str(exc))]
    return CurveRecord(t, r.solution, rec), findings


def _count_once(d: Degree, constraints, opts: CountOptions):
    types, degenerate, _ = candidate_types(d, constraints, progress=opts.progress)
    cands = sorted(types + degenerate, key=lambda t: t.code())
    if opts.threads > 1:
        with ThreadPoolExecutor(opts.threads) as pool:
            results = list(pool.map(lambda t: _evaluate(t, constraints), cands))
    else:
        results = [_evaluate(t, constraints) for t in cands]
    curves, hard = [], []
    for rec, findings in results:
        if rec is None:
            hard.extend(findings)
            continue
        if findings and opts.strict_audit:
            hard.extend(findings)
            continue
        curves.append(CurveRecord(rec.type, rec.solution, rec.record, tuple(str(f) for f in findings)))
    return curves, hard


def count_tropical(d: Degree, constraints: Sequence[AffineConstraint], opts: CountOptions | None = None) -> CountResult:
    """Weighted number of tropical curves of degree ``d`` meeting the constraints.

    Non-generic input (degenerate systems, contracted edges or audit
    violations) triggers a seeded translation of the constraints, up to
    ``max_retries`` times, unless resampling is disabled.
    """
    opts = opts or CountOptions()
    validate_degree(d)
    validate_constraints(d, constraints)
    tries = 1 + (opts.max_retries if opts.allow_resample else 0)
    findings = []
    for attempt in range(tries):
        used = _attempt_constraints(constraints, opts, attempt)
        curves, findings = _count_once(d, used, opts)
        if not findings:
            return CountResult(sum(c.record.contribution for c in curves), curves, used, attempt + 1)
    raise NonGenericConstraints(
        f"constraints not generic after {tries} attempt(s): {findings[:3]}", findings
    )


def count_by_enumeration(d: Degree, constraints: Sequence[AffineConstraint]) -> int:
    """Independent route for small cases: match every marked type of the census."""
    validate_constraints(d, constraints)
    total = 0
    for t in enumerate_marked_types(d, len(constraints), [a.codim for a in constraints]):
        r = match_type(t, constraints)
        if r.status is MatchStatus.DEGENERATE:
            raise NonGenericConstraints("degenerate type in enumeration", [t.code().decode()])
        if r.status is MatchStatus.MATCHED:
            total += multiplicity_record(t, constraints).contribution
    return total
