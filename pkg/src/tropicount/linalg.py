"""Exact integer and rational linear algebra.

Everything here works on plain Python ``int`` and :class:`fractions.Fraction`
values stored in lists of rows. Nothing ever touches floating point.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import NamedTuple, Sequence

from tropicount import _kernels

Vector = tuple
Matrix = list


class ZeroVector(ValueError):
    pass


class NotSublattice(ValueError):
    pass


class _Infinite:
    """Marker for an infinite cokernel."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Infinite"

    def __bool__(self):
        return True


INFINITE = _Infinite()


# ---------------------------------------------------------------- vectors

def primitive_part(v: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Split a nonzero integer vector as ``v = c * u`` with ``u`` primitive.

    Returns:
        The pair ``(u, c)`` with ``c > 0``.
    """
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g == 0:
        raise ZeroVector("primitive_part of the zero vector")
    return tuple(x // g for x in v), g


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def integer_row(row: Sequence[Fraction]) -> list[int]:
    """Scale a rational row to a primitive integer row (sign preserved)."""
    den = 1
    for x in row:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in row]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


# ---------------------------------------------------------------- matrices

def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def det(m: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def rref(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals.

    Returns:
        ``(R, pivots)`` where ``R`` holds only the nonzero rows.
    """
    rows = [[to_fraction(x) for x in r] for r in m]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        inv = 1 / pr[c]
        if inv != 1:
            for j in range(c, ncols):
                if pr[j]:
                    pr[j] *= inv
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    for j in range(c, ncols):
                        if pr[j]:
                            ri[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    if all(isinstance(x, int) for row in m for x in row):
        return _kernels.int_rank([list(r) for r in m])
    return len(rref(m)[1])


def nullspace(m: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : m x = 0}`` as a list of rational vectors."""
    if not m:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    r, pivots = rref(m)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(r, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def affine_solve(a: Sequence[Sequence], b: Sequence, ncols: int | None = None):
    """General solution of ``a x = b`` over the rationals.

    Returns:
        ``None`` if inconsistent, otherwise ``(x0, kernel)`` with every
        solution of the form ``x0 + sum(c_k * kernel[k])``.
    """
    if ncols is None:
        ncols = len(a[0]) if a else 0
    if not a:
        return [Fraction(0)] * ncols, nullspace([], ncols)
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    r, pivots = rref(aug)
    if pivots and pivots[-1] == ncols:
        return None
    x0 = [Fraction(0)] * ncols
    for row, p in zip(r, pivots):
        x0[p] = row[ncols]
    pivset = set(pivots)
    kernel = []
    for f in range(ncols):
        if f in pivset:
            continue
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(r, pivots):
            x[p] = -row[f]
        kernel.append(x)
    return x0, kernel


class SolveStatus(enum.Enum):
    UNIQUE = "unique"
    NONE = "none"
    UNDERDETERMINED = "underdetermined"


class Solve(NamedTuple):
    status: SolveStatus
    x: list | None = None


def solve_rational(a: Sequence[Sequence], b: Sequence) -> Solve:
    """Solve ``a x = b`` exactly.

    A system that is both inconsistent and rank deficient reports ``NONE``:
    no rational point satisfies it, so there is nothing to underdetermine.
    """
    ncols = len(a[0]) if a else 0
    sol = affine_solve(a, [to_fraction(x) for x in b], ncols)
    if sol is None:
        return Solve(SolveStatus.NONE)
    x0, kernel = sol
    if kernel:
        return Solve(SolveStatus.UNDERDETERMINED)
    return Solve(SolveStatus.UNIQUE, x0)


# ---------------------------------------------------------------- normal forms

class SmithDecomposition(NamedTuple):
    D: list[list[int]]
    U: list[list[int]]
    V: list[list[int]]
    rank: int

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(self.rank)]


def smith_normal_form(m: Sequence[Sequence[int]], ncols: int | None = None) -> SmithDecomposition:
    """Smith normal form with unimodular transforms, ``U @ M @ V == D``.

    Pivots on the entry of least absolute value in the remaining block, which
    keeps entries small on the modest sizes used here.
    """
    rows = len(m)
    cols = len(m[0]) if rows else (ncols or 0)
    a = [list(r) for r in m]
    u = identity(rows)
    v = identity(cols)
    t = 0
    while t < min(rows, cols):
        # least nonzero |entry| in the lower-right block
        best = None
        for i in range(t, rows):
            ai = a[i]
            for j in range(t, cols):
                x = ai[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            a[t], a[pi] = a[pi], a[t]
            u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for row in a:
                row[t], row[pj] = row[pj], row[t]
            for row in v:
                row[t], row[pj] = row[pj], row[t]
        done = False
        while not done:
            done = True
            p = a[t][t]
            # clear column t
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ai, at = a[i], a[t]
                        for j in range(t, cols):
                            ai[j] -= q * at[j]
                        ui, ut = u[i], u[t]
                        for j in range(rows):
                            ui[j] -= q * ut[j]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        u[t], u[i] = u[i], u[t]
                        done = False
                        break
            if not done:
                continue
            p = a[t][t]
            # clear row t
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for row in a:
                            row[j] -= q * row[t]
                        for row in v:
                            row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        for row in v:
                            row[t], row[j] = row[j], row[t]
                        done = False
                        break
            if not done:
                continue
            # divisibility of the remaining block
            p = a[t][t]
            for i in range(t + 1, rows):
                if any(a[i][j] % p for j in range(t + 1, cols)):
                    at, ai = a[t], a[i]
                    for j in range(t, cols):
                        at[j] += ai[j]
                    ut, ui = u[t], u[i]
                    for j in range(rows):
                        ut[j] += ui[j]
                    done = False
                    break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return SmithDecomposition(a, u, v, t)


def invariant_factors(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero Smith invariants ``d1 | d2 | ...`` (no transforms)."""
    if not m or not m[0]:
        return []
    return _kernels.snf_diagonal([list(r) for r in m])


def cokernel_order(m: Sequence[Sequence[int]], nrows: int | None = None):
    """Order of ``Z^rows / column-span(m)``; :data:`INFINITE` if not finite."""
    rows = len(m) if m else (nrows or 0)
    if rows == 0:
        return 1
    if not m[0]:
        return INFINITE
    diag = invariant_factors(m)
    if len(diag) < rows:
        return INFINITE
    out = 1
    for d in diag:
        out *= d
    return out


def hnf_rows(gens: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``gens``.

    Returns a basis (the nonzero rows), upper triangular with positive pivots
    and entries above each pivot reduced into ``[0, pivot)``.
    """
    a = [list(r) for r in gens if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[i0] = a[i0], a[r]
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            p = a[r][c]
            clean = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        clean = False
            if clean:
                break
        if any(a[i][c] for i in range(r, len(a))):
            p = a[r][c]
            for i in range(r):
                q = a[i][c] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == len(a):
                break
    return [row for row in a[:r] if any(row)]


# ---------------------------------------------------------------- lattices

class LatticeBasis(NamedTuple):
    ambient_rank: int
    vectors: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.vectors)


def lattice_basis(gens: Sequence[Sequence[int]], n: int) -> LatticeBasis:
    """Basis (HNF) of the lattice generated by ``gens``."""
    return LatticeBasis(n, tuple(tuple(r) for r in hnf_rows(gens)))


def saturate(generators: Sequence[Sequence[int]], n: int) -> LatticeBasis:
    """Basis of ``span_Q(generators) ∩ Z^n``."""
    gens = [list(g) for g in generators if any(g)]
    if not gens:
        return LatticeBasis(n, ())
    snf = smith_normal_form(gens, n)
    # rows of V^{-1} form a basis of Z^n; the first `rank` span the Q-space
    vinv = _unimodular_inverse(snf.V)
    basis = hnf_rows(vinv[: snf.rank])
    return LatticeBasis(n, tuple(tuple(r) for r in basis))


def _unimodular_inverse(v: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(v)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(v)]
    r, _ = rref(aug)
    out = []
    for row in r:
        out.append([int(x) for x in row[n:]])
    return out


def covolume(basis: LatticeBasis) -> int:
    """gcd of the maximal minors; the covolume of the lattice in its span."""
    vecs = [list(v) for v in basis.vectors]
    k = len(vecs)
    if k == 0:
        return 1
    from itertools import combinations

    g = 0
    for cols in combinations(range(basis.ambient_rank), k):
        g = math.gcd(g, det([[row[c] for c in cols] for row in vecs]))
    return g


def lattice_index(sub: LatticeBasis, sup: LatticeBasis) -> int:
    """Index ``[sup : sub]`` of a full-rank sublattice."""
    if sub.rank != sup.rank:
        raise NotSublattice("lattices have different ranks")
    if sub.rank == 0:
        return 1
    a = transpose([list(v) for v in sup.vectors])
    coeffs = []
    for v in sub.vectors:
        sol = solve_rational(a, list(v))
        if sol.status is not SolveStatus.UNIQUE:
            raise NotSublattice(f"{v} is not in the span of the superlattice")
        if any(x.denominator != 1 for x in sol.x):
            raise NotSublattice(f"{v} is not in the superlattice")
        coeffs.append([int(x) for x in sol.x])
    return abs(det(coeffs))
