"""Branch assembly: find every marked type that can match the constraints.

A *branch* is a rooted subtree hanging off a stem edge: either a single end,
or a vertex ``c`` joining two branches with the stem running from the parent
attachment point ``p = c - lambda * u_S`` to ``c`` (``u_S`` is the primitive
outflow of the branch's ends). For each branch the set of feasible
attachment points is an affine family ``p = p0 + P z`` over a polyhedron in
``z``. Families with a non-injective ``P`` cannot occur in a rigid curve and
are dropped once all their marks are placed.

Every trivalent tree has a centre vertex whose three branches each carry at
most half of the ends, so branches are built only up to that size and glued
in complementary triples. Lengths use the closed condition ``lambda >= 0``;
strict positivity is left to :func:`tropicount.solver.match_type`, which
re-solves every candidate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from tropicount.combinatorics import Degree, Edge, TropicalType
from tropicount.constraints import AffineConstraint
from tropicount.linalg import primitive_part, rank
from tropicount._kernels import reduce_ineqs_int, solve_int


@dataclass(frozen=True)
class Family:
    """Points ``p0 + P z`` for ``z`` in ``{z : a.z + c >= 0}``.

    ``P`` and the inequality rows ``(a..., c, strict)`` are integral; only
    ``p0`` is rational.
    """

    dim: int
    p0: tuple[Fraction, ...]
    P: tuple[tuple[int, ...], ...]  # n rows, dim columns
    ineqs: tuple[tuple[int, ...], ...]

    def injective(self) -> bool:
        if self.dim == 0:
            return True
        return rank([list(r) for r in self.P]) == self.dim


def _reduce(nvars, eq_rows, eq_rhs, top0, top_rows, ineqs) -> Family | None:
    """Eliminate the equalities and return the family of top points, or ``None`` if empty.

    Integer ``eq_rows`` with rational ``eq_rhs``; the top point is
    ``top0 + top_rows . x``; ``ineqs`` are integer rows ``(a..., c)`` meaning
    ``a.x + c >= 0``.
    """
    if eq_rows:
        aug = []
        for row, b in zip(eq_rows, eq_rhs):
            q = b.denominator
            aug.append([q * x for x in row] + [b.numerator])
        sol = solve_int(aug, nvars)
        if sol is None:
            return None
        den, x0, K = sol
    else:
        den, x0 = 1, [0] * nvars
        K = [[int(i == j) for j in range(nvars)] for i in range(nvars)]
    dim = len(K)
    nzK = [[(j, k[j]) for j in range(nvars) if k[j]] for k in K]

    def compose(row):
        lin = tuple(sum(row[j] * x for j, x in nz) for nz in nzK)
        return lin, sum(row[j] * x0[j] for j in range(nvars) if row[j] and x0[j])

    p0, P = [], []
    for c, row in zip(top0, top_rows):
        a, b = compose(row)
        P.append(a)
        p0.append(c + Fraction(b, den))
    qs = []
    for row in ineqs:
        a, b = compose(row)
        qs.append(tuple(den * x for x in a) + (b + den * row[nvars], 0))
    if dim == 0:
        if any(q[0] < 0 for q in qs):
            return None
        kept = ()
    else:
        red = reduce_ineqs_int(qs, dim)
        if red is None:
            return None
        kept = tuple(red)
    return Family(dim, tuple(p0), tuple(P), kept)


@dataclass(frozen=True)
class Branch:
    counts: tuple[int, ...]
    marks: int  # bitmask of constraints placed in the branch, stem included
    struct: tuple
    fam: Family


class Assembler:
    """Enumerates candidate marked types for a degree and constraint tuple."""

    def __init__(self, d: Degree, constraints: Sequence[AffineConstraint]):
        self.d = d
        self.n = d.n
        self.A = list(constraints)
        self.l = len(self.A)
        self.vecs = d.vectors
        self.total = d.counts
        self.units = [primitive_part(v)[0] for v in self.vecs]
        self.codims = [a.codim for a in self.A]
        self.by_size: dict[int, dict[tuple, list[Branch]]] = {}
        self.stats = {"branches": 0, "pairs": 0, "centres": 0}
        self.progress = None

    def dsum(self, mask: int) -> int:
        return sum(self.codims[j] for j in _bits(mask))

    def flow(self, counts):
        out = [0] * self.n
        for c, v in zip(counts, self.vecs):
            for k in range(self.n):
                out[k] += c * v[k]
        return tuple(out)

    # -- families
    def _leaf_families(self, i: int):
        """Mark sets on the end ``i`` with nonempty families, as ``(mask, family)``."""
        n = self.n
        u = self.units[i]

        def build(mlist):
            # variables: p (n), then per mark t, s...
            nv = n + sum(1 + self.A[j].dim for j in mlist)
            rows, rhs, ineqs = [], [], []
            col = n
            for j in mlist:
                a = self.A[j]
                for k in range(n):
                    r = [0] * nv
                    r[k] = 1
                    r[col] = u[k]
                    for q, vec in enumerate(a.directions.vectors):
                        r[col + 1 + q] = -vec[k]
                    rows.append(r)
                    rhs.append(a.base[k])
                t = [0] * (nv + 1)
                t[col] = 1
                ineqs.append(t)
                col += 1 + a.dim
            top_rows = [[int(c == k) for c in range(nv)] for k in range(n)]
            return _reduce(nv, rows, rhs, [Fraction(0)] * n, top_rows, ineqs)

        return self._mark_dfs(build, exclude=0)

    def _mark_dfs(self, build, exclude):
        """``(mask, family)`` for every mark set outside ``exclude`` with a nonempty family.

        Adding marks only shrinks a family, so an empty one ends its subtree.
        """
        out = []

        def rec(mlist, nxt):
            fam = build(mlist)
            if fam is None:
                return
            out.append((sum(1 << j for j in mlist), fam))
            for j in range(nxt, self.l):
                if not (exclude >> j) & 1:
                    rec(mlist + [j], j + 1)

        rec([], 0)
        return out

    def _meet(self, f1: Family, f2: Family) -> Family | None:
        """Family of common points of two families."""
        n = self.n
        d1, d2 = f1.dim, f2.dim
        rows, rhs = [], []
        for k in range(n):
            rows.append(list(f1.P[k]) + [-x for x in f2.P[k]])
            rhs.append(f2.p0[k] - f1.p0[k])
        ineqs = [q[:d1] + (0,) * d2 + q[d1:d1 + 1] for q in f1.ineqs]
        ineqs += [(0,) * d1 + q[:d2 + 1] for q in f2.ineqs]
        top = [f1.P[k] + (0,) * d2 for k in range(n)]
        return _reduce(d1 + d2, rows, rhs, list(f1.p0), top, ineqs)

    def _stem_families(self, vert: Family, u: tuple[int, ...], exclude: int):
        """Stem ``p = c - lambda*u`` below a vertex family; DFS over stem marks."""
        n = self.n
        dv = vert.dim

        def build(mlist):
            # variables: w (vertex family), lambda, then per mark t, s...
            nv = dv + 1 + sum(1 + self.A[j].dim for j in mlist)
            lam = dv
            rows, rhs = [], []
            ineqs = [q[:dv] + (0,) * (nv - dv) + q[dv:dv + 1] for q in vert.ineqs]
            r = [0] * (nv + 1)
            r[lam] = 1
            ineqs.append(r)
            top_rows = []
            for k in range(n):
                row = list(vert.P[k]) + [0] * (nv - dv)
                row[lam] = -u[k]
                top_rows.append(row)
            col = dv + 1
            for j in mlist:
                a = self.A[j]
                for k in range(n):
                    row = list(top_rows[k])
                    row[col] = u[k]
                    for q, vec in enumerate(a.directions.vectors):
                        row[col + 1 + q] = -vec[k]
                    rows.append(row)
                    rhs.append(a.base[k] - vert.p0[k])
                t = [0] * (nv + 1)
                t[col] = 1
                ineqs.append(t)
                t2 = [0] * (nv + 1)
                t2[lam] = 1
                t2[col] = -1
                ineqs.append(t2)
                col += 1 + a.dim
            return _reduce(nv, rows, rhs, list(vert.p0), top_rows, ineqs)

        return self._mark_dfs(build, exclude=exclude)

    # -- search
    def max_branch(self) -> int:
        return self.d.e // 2

    def branches(self) -> None:
        n_ends = len(self.vecs)
        level1 = {}
        for i in range(n_ends):
            counts = tuple(int(k == i) for k in range(n_ends))
            for mask, fam in self._leaf_families(i):
                if not fam.injective():
                    continue
                struct = ("L", i, _bits(mask))
                level1.setdefault((counts, mask), []).append(Branch(counts, mask, struct, fam))
        self.by_size[1] = level1
        self.stats["branches"] += sum(len(v) for v in level1.values())
        for k in range(2, self.max_branch() + 1):
            level = {}
            for k1 in range(1, k // 2 + 1):
                k2 = k - k1
                for key1, bl1 in self.by_size.get(k1, {}).items():
                    for key2, bl2 in self.by_size.get(k2, {}).items():
                        if k1 == k2 and key2 < key1:
                            continue
                        self._join(key1, bl1, key2, bl2, level)
            self.by_size[k] = level
            self.stats["branches"] += sum(len(v) for v in level.values())
            if self.progress:
                self.progress(k, len(level), sum(len(v) for v in level.values()), dict(self.stats))

    def _join(self, key1, bl1, key2, bl2, level):
        (c1, m1), (c2, m2) = key1, key2
        if m1 & m2:
            return
        counts = tuple(a + b for a, b in zip(c1, c2))
        if any(a > b for a, b in zip(counts, self.total)):
            return
        flow = self.flow(counts)
        if not any(flow):
            return
        k = sum(counts)
        inner = m1 | m2
        # rigidity of the complementary branch, which carries every other mark
        if self.d.e - k >= 2 and self.dsum(inner) > self.n + k - 2:
            return
        need = k - 1  # rigidity of this branch
        u = primitive_part(flow)[0]
        same = key1 == key2
        for i, b1 in enumerate(bl1):
            for j in range(i if same else 0, len(bl2)):
                b2 = bl2[j]
                self.stats["pairs"] += 1
                vert = self._meet(b1.fam, b2.fam)
                if vert is None:
                    continue
                for smask, fam in self._stem_families(vert, u, inner):
                    if self.dsum(inner | smask) < need or not fam.injective():
                        continue
                    mask = inner | smask
                    struct = ("N", b1.struct, b2.struct, _bits(smask))
                    level.setdefault((counts, mask), []).append(Branch(counts, mask, struct, fam))

    def centres(self):
        """Yield ``(structs, status)`` for each glued triple of branches.

        ``status`` is ``"point"`` for an isolated centre and ``"family"`` when
        the centre moves in a positive-dimensional family.
        """
        full = (1 << self.l) - 1
        keys = sorted(
            ((size, key) for size, level in self.by_size.items() for key in level),
        )
        order = {sk: i for i, sk in enumerate(keys)}
        for i1, (s1, key1) in enumerate(keys):
            c1, m1 = key1
            for i2 in range(i1, len(keys)):
                s2, key2 = keys[i2]
                c2, m2 = key2
                if m1 & m2:
                    continue
                s3 = self.d.e - s1 - s2
                if s3 < s2:
                    break
                if s3 > self.max_branch():
                    continue
                c3 = tuple(t - a - b for t, a, b in zip(self.total, c1, c2))
                if min(c3) < 0:
                    continue
                key3 = (c3, full & ~(m1 | m2))
                i3 = order.get((s3, key3))
                if i3 is None or i3 < i2:
                    continue
                yield from self._centre(self.by_size[s1][key1], self.by_size[s2][key2],
                                        self.by_size[s3][key3], i1 == i2, i2 == i3)

    def _centre(self, bl1, bl2, bl3, same12, same23):
        for i, b1 in enumerate(bl1):
            for j in range(i if same12 else 0, len(bl2)):
                b2 = bl2[j]
                v12 = self._meet(b1.fam, b2.fam)
                if v12 is None:
                    continue
                for k in range(j if same23 else 0, len(bl3)):
                    b3 = bl3[k]
                    self.stats["centres"] += 1
                    v = self._meet(v12, b3.fam)
                    if v is None:
                        continue
                    yield (b1.struct, b2.struct, b3.struct), ("point" if v.dim == 0 else "family")


def _bits(mask: int) -> tuple[int, ...]:
    out, j = [], 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


# ---------------------------------------------------------------- types from structures

def struct_counts(struct, n_vecs: int) -> tuple[int, ...]:
    if struct[0] == "L":
        return tuple(int(k == struct[1]) for k in range(n_vecs))
    a, b = struct_counts(struct[1], n_vecs), struct_counts(struct[2], n_vecs)
    return tuple(x + y for x, y in zip(a, b))


def type_from_centre(d: Degree, l: int, structs) -> TropicalType:
    """Marked type of the curve whose centre vertex joins the given branches."""
    vecs = d.vectors
    n = d.n
    nvec = len(vecs)
    raw = []  # (ends, flow out of ends[0] along the edge, marks)
    nv = [0]

    def flow(counts):
        out = [0] * n
        for c, v in zip(counts, vecs):
            for k in range(n):
                out[k] += c * v[k]
        return tuple(out)

    def hang(c: int, child) -> None:
        if child[0] == "L":
            raw.append(((c,), vecs[child[1]], child[2]))
            return
        cc = nv[0]
        nv[0] += 1
        hang(cc, child[1])
        hang(cc, child[2])
        raw.append(((c, cc), flow(struct_counts(child, nvec)), child[3]))

    nv[0] = 1
    for s in structs:
        hang(0, s)
    edges, markings = [], [None] * l
    for idx, (ends, m, marks) in enumerate(raw):
        if len(ends) == 2 and ends[0] > ends[1]:
            ends, m = (ends[1], ends[0]), tuple(-x for x in m)
        u, w = primitive_part(m)
        edges.append(Edge(ends, w, u))
        for j in marks:
            markings[j] = idx
    return TropicalType(n, nv[0], tuple(edges), tuple(markings))


def candidate_types(d: Degree, constraints: Sequence[AffineConstraint], progress=None):
    """Distinct marked types produced by branch assembly.

    Returns ``(types, degenerate, stats)``; ``degenerate`` holds types whose
    gluing left a positive-dimensional family of centres.
    """
    asm = Assembler(d, constraints)
    asm.progress = progress
    asm.branches()
    seen, degenerate = {}, {}
    for structs, status in asm.centres():
        t = type_from_centre(d, len(constraints), structs)
        code = t.code()
        (degenerate if status == "family" else seen).setdefault(code, t)
    return list(seen.values()), list(degenerate.values()), asm.stats
