"""Degrees, trivalent trees and tropical types.

A type is stored with its vertices numbered ``0..V-1`` and edges as
:class:`Edge` records. Bounded edges carry an orientation ``(tail, head)``
with ``tail < head``; ``direction`` is the primitive vector pointing from the
first listed vertex along the edge (outwards, for unbounded edges).
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from tropicount.linalg import primitive_part


class InvalidDegree(ValueError):
    def __init__(self, reason: str, total: tuple | None = None):
        super().__init__(reason)
        self.total = total


class TooFewLeaves(ValueError):
    pass


class RejectedType(ValueError):
    """Raised by :func:`derive_type` when a leaf assignment gives no type."""


class ContractedEdge(RejectedType):
    pass


class CodimensionMismatch(ValueError):
    pass


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _scale(c, a):
    return tuple(c * x for x in a)


# ---------------------------------------------------------------- degree

@dataclass(frozen=True)
class Degree:
    """Weighted directions of the unbounded edges with multiplicities.

    ``entries`` maps a nonzero integer vector ``w * u`` (``u`` primitive,
    ``w`` the edge weight) to the number of unbounded edges of that kind.
    """

    n: int
    entries: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_mapping(cls, n: int, mapping) -> "Degree":
        merged = Counter()
        for v, c in dict(mapping).items():
            merged[tuple(int(x) for x in v)] += int(c)
        return cls(n, tuple(sorted((v, c) for v, c in merged.items() if c)))

    @classmethod
    def from_json(cls, data: dict) -> "Degree":
        merged = Counter()
        for ray in data["rays"]:
            merged[tuple(int(x) for x in ray["v"])] += int(ray.get("count", 1))
        return cls.from_mapping(int(data["n"]), merged)

    def to_json(self) -> dict:
        return {"n": self.n, "rays": [{"v": list(v), "count": c} for v, c in self.entries]}

    @property
    def vectors(self) -> list[tuple[int, ...]]:
        return [v for v, _ in self.entries]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(c for _, c in self.entries)

    @property
    def e(self) -> int:
        return sum(c for _, c in self.entries)

    def multiset(self) -> list[tuple[int, ...]]:
        """The ``e`` weighted end vectors, repeated by count, sorted."""
        return [v for v, c in self.entries for _ in range(c)]

    @property
    def total_vector(self) -> tuple[int, ...]:
        tot = (0,) * self.n
        for v, c in self.entries:
            tot = _add(tot, _scale(c, v))
        return tot


def validate_degree(d: Degree) -> None:
    """Raise :class:`InvalidDegree` unless ``d`` is balanced and nonempty."""
    if not d.entries:
        raise InvalidDegree("degree has empty support")
    for v, c in d.entries:
        if len(v) != d.n:
            raise InvalidDegree(f"vector {v} does not live in rank {d.n}")
        if not any(v):
            raise InvalidDegree("zero vector in degree")
        if c <= 0:
            raise InvalidDegree(f"non-positive count for {v}")
    total = d.total_vector
    if any(total):
        raise InvalidDegree(f"end vectors sum to {total}, not zero", total)


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Edge:
    ends: tuple[int, ...]
    weight: int
    direction: tuple[int, ...]

    @property
    def bounded(self) -> bool:
        return len(self.ends) == 2

    @property
    def tail(self) -> int:
        return self.ends[0]

    @property
    def weighted(self) -> tuple[int, ...]:
        return _scale(self.weight, self.direction)


@dataclass(frozen=True)
class TropicalType:
    """A genus-0 type: weighted tree, flag directions and an ordered marking."""

    n: int
    num_vertices: int
    edges: tuple[Edge, ...]
    markings: tuple[int, ...] = ()
    _code: list = field(default_factory=list, compare=False, repr=False, hash=False)

    # -- structure
    @property
    def bounded_edges(self) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.bounded]

    @property
    def unbounded_edges(self) -> list[int]:
        return [i for i, e in enumerate(self.edges) if not e.bounded]

    @property
    def e(self) -> int:
        return len(self.unbounded_edges)

    @property
    def l(self) -> int:
        return len(self.markings)

    @property
    def genus(self) -> int:
        return len(self.bounded_edges) - self.num_vertices + 1

    def valence(self, v: int) -> int:
        return sum(1 for e in self.edges for x in e.ends if x == v)

    @property
    def overvalence(self) -> int:
        return sum(self.valence(v) - 3 for v in range(self.num_vertices))

    def incident(self, v: int) -> list[int]:
        return [i for i, e in enumerate(self.edges) if v in e.ends]

    def flag_direction(self, v: int, ei: int) -> tuple[int, ...]:
        """Primitive vector emanating from vertex ``v`` along edge ``ei``."""
        e = self.edges[ei]
        if e.ends[0] == v:
            return e.direction
        if e.bounded and e.ends[1] == v:
            return _neg(e.direction)
        raise ValueError(f"vertex {v} is not on edge {ei}")

    @property
    def degree(self) -> Degree:
        return Degree.from_mapping(
            self.n, Counter(self.edges[i].weighted for i in self.unbounded_edges)
        )

    def check_balancing(self) -> bool:
        for v in range(self.num_vertices):
            tot = (0,) * self.n
            for ei in self.incident(v):
                tot = _add(tot, _scale(self.edges[ei].weight, self.flag_direction(v, ei)))
            if any(tot):
                return False
        return True

    @property
    def inner_weight(self) -> int:
        """Product of the weights of the bounded edges."""
        w = 1
        for i in self.bounded_edges:
            w *= self.edges[i].weight
        return w

    def with_markings(self, markings: Sequence[int]) -> "TropicalType":
        return TropicalType(self.n, self.num_vertices, self.edges, tuple(markings))

    def unmarked(self) -> "TropicalType":
        return self.with_markings(())

    def vertex_distances(self) -> list[list[int]]:
        adj = [[] for _ in range(self.num_vertices)]
        for e in self.edges:
            if e.bounded:
                a, b = e.ends
                adj[a].append(b)
                adj[b].append(a)
        dist = []
        for s in range(self.num_vertices):
            d = [-1] * self.num_vertices
            d[s] = 0
            q = deque([s])
            while q:
                x = q.popleft()
                for y in adj[x]:
                    if d[y] < 0:
                        d[y] = d[x] + 1
                        q.append(y)
            dist.append(d)
        return dist

    def edge_distance(self, i: int, j: int, vdist=None) -> int:
        """Number of other edges on a shortest path joining edges ``i`` and ``j``.

        Adjacent edges have distance 0 and an edge has distance -1 to itself.
        """
        if i == j:
            return -1
        vdist = vdist or self.vertex_distances()
        return min(vdist[a][b] for a in self.edges[i].ends for b in self.edges[j].ends)

    def code(self) -> bytes:
        if not self._code:
            self._code.append(canonical_form(self))
        return self._code[0]


# ---------------------------------------------------------------- canonical form

def canonical_form(t: TropicalType) -> bytes:
    """Isomorphism-invariant code of a marked type.

    Rooted AHU encoding at every vertex, minimised over the roots. Leaves are
    labelled by their weighted vectors, edges by the sorted marking indices
    they carry. Interior directions and weights are sums of leaf vectors and
    so are determined by the encoding.
    """
    marks = [[] for _ in t.edges]
    for idx, ei in enumerate(t.markings):
        marks[ei].append(idx)
    mark_str = ["" if not m else "[" + ".".join(map(str, sorted(m))) + "]" for m in marks]
    inc = [[] for _ in range(t.num_vertices)]
    for i, e in enumerate(t.edges):
        for v in e.ends:
            inc[v].append(i)

    def enc(v: int, parent: int) -> str:
        parts = []
        for ei in inc[v]:
            if ei == parent:
                continue
            e = t.edges[ei]
            if not e.bounded:
                vec = e.weighted
                parts.append("L" + ",".join(map(str, vec)) + mark_str[ei])
            else:
                other = e.ends[1] if e.ends[0] == v else e.ends[0]
                parts.append("B" + mark_str[ei] + enc(other, ei))
        parts.sort()
        return "(" + "".join(parts) + ")"

    best = min(enc(v, -1) for v in range(t.num_vertices)) if t.num_vertices else ""
    return f"{t.n}:{best}".encode()


def explicit_isomorphism(a: TropicalType, b: TropicalType) -> bool:
    """Decide isomorphism of two marked types by backtracking on vertex maps.

    Independent of :func:`canonical_form`; used to audit it.
    """
    if (a.n, a.num_vertices, len(a.edges), a.l) != (b.n, b.num_vertices, len(b.edges), b.l):
        return False

    def edge_sig(t, ei):
        e = t.edges[ei]
        mk = tuple(sorted(i for i, m in enumerate(t.markings) if m == ei))
        return e.bounded, mk

    def vertex_flags(t, v):
        out = []
        for ei in t.incident(v):
            e = t.edges[ei]
            out.append((edge_sig(t, ei), e.weight, t.flag_direction(v, ei), ei))
        return out

    fa = [vertex_flags(a, v) for v in range(a.num_vertices)]
    fb = [vertex_flags(b, v) for v in range(b.num_vertices)]

    def local_key(flags):
        return sorted((s, w, d) for s, w, d, _ in flags)

    ka = [local_key(f) for f in fa]
    kb = [local_key(f) for f in fb]
    bounded_a = {}
    for ei in a.bounded_edges:
        x, y = a.edges[ei].ends
        bounded_a[(x, y)] = ei
        bounded_a[(y, x)] = ei
    bounded_b = {}
    for ei in b.bounded_edges:
        x, y = b.edges[ei].ends
        bounded_b[(x, y)] = ei
        bounded_b[(y, x)] = ei

    mapping = {}
    used = set()

    def consistent(va, vb):
        if ka[va] != kb[vb]:
            return False
        for (x, y), ei in bounded_a.items():
            if x == va and y in mapping:
                ej = bounded_b.get((vb, mapping[y]))
                if ej is None:
                    return False
                if edge_sig(a, ei) != edge_sig(b, ej):
                    return False
                if a.flag_direction(va, ei) != b.flag_direction(vb, ej):
                    return False
                if a.edges[ei].weight != b.edges[ej].weight:
                    return False
        return True

    order = list(range(a.num_vertices))

    def bt(k):
        if k == len(order):
            return True
        va = order[k]
        for vb in range(b.num_vertices):
            if vb in used or not consistent(va, vb):
                continue
            mapping[va] = vb
            used.add(vb)
            if bt(k + 1):
                return True
            del mapping[va]
            used.discard(vb)
        return False

    return bt(0)


# ---------------------------------------------------------------- leaf trees

@dataclass(frozen=True)
class LeafTree:
    """Trivalent tree with leaves ``0..e-1`` and internal nodes ``e..2e-3``."""

    e: int
    edges: tuple[tuple[int, int], ...]


def enumerate_leaf_trees(e: int) -> list[LeafTree]:
    """All ``(2e-5)!!`` trivalent trees with ``e`` labelled leaves."""
    if e < 3:
        raise TooFewLeaves(f"need at least 3 leaves, got {e}")
    out = []

    def grow(edges: list[tuple[int, int]], k: int, next_internal: int):
        if k == e:
            out.append(LeafTree(e, tuple(edges)))
            return
        for idx in range(len(edges)):
            a, b = edges[idx]
            m = next_internal
            new = edges[:idx] + [(a, m), (m, b), (m, k)] + edges[idx + 1:]
            grow(new, k + 1, next_internal + 1)

    grow([(0, e), (1, e), (2, e)], 3, e + 1)
    return out


def derive_type(tree: LeafTree, leaf_vectors: Sequence[Sequence[int]], n: int | None = None) -> TropicalType:
    """Type of a labelled tree whose leaf ``i`` carries weighted vector ``leaf_vectors[i]``.

    Raises:
        ContractedEdge: some bounded edge would carry the zero vector.
    """
    e = tree.e
    vecs = [tuple(v) for v in leaf_vectors]
    n = n if n is not None else len(vecs[0])
    adj = {}
    for a, b in tree.edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    internal = sorted(x for x in adj if x >= e)
    vid = {x: i for i, x in enumerate(internal)}

    # flow out of x through the edge towards y = sum of leaves beyond y
    memo = {}

    def beyond(x, y):
        key = (x, y)
        if key in memo:
            return memo[key]
        if y < e:
            s = vecs[y]
        else:
            s = (0,) * n
            for z in adj[y]:
                if z != x:
                    s = _add(s, beyond(y, z))
        memo[key] = s
        return s

    edges = []
    for leaf in range(e):
        (x,) = adj[leaf]
        u, w = primitive_part(vecs[leaf])
        edges.append(Edge((vid[x],), w, u))
    for a, b in tree.edges:
        if a < e or b < e:
            continue
        va, vb = vid[a], vid[b]
        if va > vb:
            a, b, va, vb = b, a, vb, va
        m = beyond(a, b)
        if not any(m):
            raise ContractedEdge(f"edge {va}-{vb} carries the zero vector")
        u, w = primitive_part(m)
        edges.append(Edge((va, vb), w, u))
    t = TropicalType(n, len(internal), tuple(edges))
    assert t.check_balancing()
    return t


# ---------------------------------------------------------------- rooted shapes

def _msub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _sub_multisets(counts: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    for sub in itertools.product(*(range(c + 1) for c in counts)):
        yield sub


class ShapeBuilder:
    """Rooted trivalent shapes over a multiset of end vectors.

    A shape is ``("L", i)`` for an end with vector ``vecs[i]`` or
    ``("N", a, b)`` for a vertex joining two sub-shapes. Shapes whose stem
    would carry the zero vector are never produced.
    """

    def __init__(self, vecs: Sequence[tuple[int, ...]], n: int):
        self.vecs = [tuple(v) for v in vecs]
        self.n = n
        self._memo: dict[tuple[int, ...], list] = {}

    def flow(self, counts: tuple[int, ...]) -> tuple[int, ...]:
        tot = (0,) * self.n
        for c, v in zip(counts, self.vecs):
            if c:
                tot = _add(tot, _scale(c, v))
        return tot

    def splits(self, counts: tuple[int, ...]):
        """Unordered splits ``counts = a + b`` with both parts nonempty and non-null."""
        for a in _sub_multisets(counts):
            b = _msub(counts, a)
            if a > b or not any(a) or not any(b):
                continue
            if not any(self.flow(a)) or not any(self.flow(b)):
                continue
            yield a, b

    def shapes(self, counts: tuple[int, ...]) -> list:
        if counts in self._memo:
            return self._memo[counts]
        k = sum(counts)
        out = []
        if k == 1:
            out.append(("L", counts.index(1)))
        else:
            for a, b in self.splits(counts):
                sa, sb = self.shapes(a), self.shapes(b)
                if a == b:
                    for i in range(len(sa)):
                        for j in range(i, len(sa)):
                            out.append(("N", sa[i], sa[j]))
                else:
                    for x in sa:
                        for y in sb:
                            out.append(("N", x, y))
        self._memo[counts] = out
        return out


def type_from_rooted(n: int, vecs, root_index: int, left, right) -> TropicalType:
    """Assemble a type from an end ``vecs[root_index]`` and two rooted shapes."""
    builder = _TypeAssembler(n, vecs)
    r = builder.new_vertex()
    builder.add_end(r, root_index)
    builder.attach(r, left)
    builder.attach(r, right)
    return builder.finish()


class _TypeAssembler:
    def __init__(self, n, vecs):
        self.n = n
        self.vecs = vecs
        self.nv = 0
        self.raw = []  # (ends, weighted vector from ends[0])

    def new_vertex(self) -> int:
        self.nv += 1
        return self.nv - 1

    def add_end(self, v, idx):
        self.raw.append(((v,), self.vecs[idx]))

    def attach(self, parent, shape) -> tuple[int, ...]:
        """Hang ``shape`` below ``parent``; return the flow along the stem."""
        if shape[0] == "L":
            self.add_end(parent, shape[1])
            return self.vecs[shape[1]]
        c = self.new_vertex()
        slot = len(self.raw)
        self.raw.append(None)
        m = _add(self.attach(c, shape[1]), self.attach(c, shape[2]))
        self.raw[slot] = ((parent, c), m)
        return m

    def finish(self) -> TropicalType:
        edges = []
        for ends, m in self.raw:
            if len(ends) == 2 and ends[0] > ends[1]:
                ends, m = (ends[1], ends[0]), _neg(m)
            u, w = primitive_part(m)
            edges.append(Edge(ends, w, u))
        return TropicalType(self.n, self.nv, tuple(edges))


def enumerate_types(d: Degree) -> list[TropicalType]:
    """All trivalent genus-0 types of degree ``d``, one per isomorphism class."""
    validate_degree(d)
    if d.e < 3:
        raise TooFewLeaves(f"degree has only {d.e} ends")
    return list(iter_types(d))


def iter_types(d: Degree) -> Iterator[TropicalType]:
    vecs = d.vectors
    counts = d.counts
    builder = ShapeBuilder(vecs, d.n)
    root = max(range(len(vecs)), key=lambda i: (counts[i] == 1, -counts[i]))
    rest = tuple(c - (i == root) for i, c in enumerate(counts))
    seen = set()
    for a, b in builder.splits(rest):
        sa, sb = builder.shapes(a), builder.shapes(b)
        pairs = (
            ((sa[i], sa[j]) for i in range(len(sa)) for j in range(i, len(sa)))
            if a == b
            else itertools.product(sa, sb)
        )
        for x, y in pairs:
            t = type_from_rooted(d.n, vecs, root, x, y)
            if counts[root] == 1 and a != b:
                yield t
                continue
            c = t.code()
            if c not in seen:
                seen.add(c)
                yield t


def brute_force_types(d: Degree) -> list[TropicalType]:
    """Labelled trees times distinct leaf assignments, deduplicated.

    Exponential; kept as the independent oracle for :func:`enumerate_types`.
    """
    validate_degree(d)
    ms = d.multiset()
    seen = {}
    for tree in enumerate_leaf_trees(len(ms)):
        for perm in set(itertools.permutations(ms)):
            try:
                t = derive_type(tree, perm, d.n)
            except ContractedEdge:
                continue
            seen.setdefault(t.code(), t)
    return list(seen.values())


# ---------------------------------------------------------------- markings

def automorphisms(t: TropicalType) -> list[tuple[int, ...]]:
    """Automorphisms of an unmarked type as permutations of edge indices."""
    nv = t.num_vertices
    inc = [t.incident(v) for v in range(nv)]
    sig = [sorted((t.edges[ei].bounded, t.flag_direction(v, ei), t.edges[ei].weight) for ei in inc[v])
           for v in range(nv)]
    out = []
    mapping = [-1] * nv

    def bt(v):
        if v == nv:
            perms = _edge_perms(t, mapping, inc)
            out.extend(perms)
            return
        for w in range(nv):
            if w in mapping[:v] or sig[v] != sig[w]:
                continue
            ok = True
            for ei in inc[v]:
                e = t.edges[ei]
                if e.bounded:
                    other = e.ends[1] if e.ends[0] == v else e.ends[0]
                    if other < v:
                        target = mapping[other]
                        if not any(t.edges[ej].bounded and target in t.edges[ej].ends and w in t.edges[ej].ends
                                   and t.flag_direction(w, ej) == t.flag_direction(v, ei) for ej in inc[w]):
                            ok = False
                            break
            if not ok:
                continue
            mapping[v] = w
            bt(v + 1)
            mapping[v] = -1

    bt(0)
    return out


def _edge_perms(t, mapping, inc):
    """Edge permutations induced by a vertex map (ends of equal vector may swap)."""
    base = [-1] * len(t.edges)
    groups = []
    for v in range(t.num_vertices):
        w = mapping[v]
        for ei in inc[v]:
            e = t.edges[ei]
            if e.bounded and e.ends[0] == v:
                a, b = mapping[e.ends[0]], mapping[e.ends[1]]
                base[ei] = next(ej for ej in inc[w] if t.edges[ej].bounded and set(t.edges[ej].ends) == {a, b})
        ends_v = [ei for ei in inc[v] if not t.edges[ei].bounded]
        ends_w = [ej for ej in inc[w] if not t.edges[ej].bounded]
        by_vec = {}
        for ei in ends_v:
            by_vec.setdefault(t.edges[ei].weighted, ([], []))[0].append(ei)
        for ej in ends_w:
            by_vec.setdefault(t.edges[ej].weighted, ([], []))[1].append(ej)
        for src, dst in by_vec.values():
            groups.append((src, dst))
    perms = []
    choices = [list(itertools.permutations(dst)) for _, dst in groups]
    for combo in itertools.product(*choices):
        p = list(base)
        for (src, _), dst in zip(groups, combo):
            for a, b in zip(src, dst):
                p[a] = b
        perms.append(tuple(p))
    return perms


def enumerate_marked_types(
    d: Degree,
    l: int,
    codims: Sequence[int],
    types: Iterable[TropicalType] | None = None,
) -> list[TropicalType]:
    """All marked types with an ordered ``l``-tuple of marked edges.

    Assignments are reduced modulo automorphisms of the underlying type and
    pruned by the distance bound ``dist(E_i, E_j) >= d_i + d_j - n``.
    """
    if len(codims) != l:
        raise CodimensionMismatch(f"{len(codims)} codimensions for {l} markings")
    if sum(codims) != d.e + d.n - 3:
        raise CodimensionMismatch(f"sum of codimensions {sum(codims)} != e+n-3 = {d.e + d.n - 3}")
    if types is None:
        types = enumerate_types(d)
    out = []
    n = d.n
    for t in types:
        if l == 0:
            out.append(t)
            continue
        vdist = t.vertex_distances()
        ne = len(t.edges)
        dist = [[t.edge_distance(i, j, vdist) for j in range(ne)] for i in range(ne)]
        auts = automorphisms(t)
        for assign in itertools.product(range(ne), repeat=l):
            if any(dist[assign[i]][assign[j]] < codims[i] + codims[j] - n
                   for i in range(l) for j in range(i + 1, l)):
                continue
            if any(tuple(p[x] for x in assign) < assign for p in auts):
                continue
            out.append(t.with_markings(assign))
    return out
