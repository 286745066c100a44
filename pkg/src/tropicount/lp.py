"""Exact linear feasibility and optimisation over the rationals.

Constraints are ``(a, c, strict)`` triples meaning ``<a, x> + c >= 0`` or
``> 0`` when ``strict``. Fourier-Motzkin handles the small systems that show
up in curve assembly; a dense simplex with Bland's rule covers the rest.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence


class Ineq(NamedTuple):
    a: tuple[Fraction, ...]
    c: Fraction
    strict: bool = False

    def value(self, x: Sequence) -> Fraction:
        return sum((ai * xi for ai, xi in zip(self.a, x)), Fraction(0)) + self.c

    def holds(self, x: Sequence) -> bool:
        v = self.value(x)
        return v > 0 if self.strict else v >= 0


def ineq(a: Iterable, c=0, strict: bool = False) -> Ineq:
    return Ineq(tuple(Fraction(v) for v in a), Fraction(c), strict)


def _normalise(q: Ineq) -> Ineq | None | bool:
    """Scale so the first nonzero coefficient is +-1.

    Returns ``True`` for a tautology, ``False`` for a contradiction.
    """
    for v in q.a:
        if v:
            s = abs(v)
            return Ineq(tuple(x / s for x in q.a), q.c / s, q.strict)
    if q.strict:
        return q.c > 0
    return q.c >= 0


def _dedupe(qs: Iterable[Ineq]) -> list[Ineq] | None:
    """Drop tautologies and parallel duplicates; ``None`` on a contradiction."""
    best: dict[tuple, Ineq] = {}
    for q in qs:
        r = _normalise(q)
        if r is True:
            continue
        if r is False:
            return None
        key = r.a
        old = best.get(key)
        # tighter bound: smaller c, strict beats non-strict on ties
        if old is None or r.c < old.c or (r.c == old.c and r.strict and not old.strict):
            best[key] = r
    return list(best.values())


def fm_eliminate(qs: Sequence[Ineq], k: int) -> list[Ineq] | None:
    """Project out variable ``k``; the result no longer mentions it."""
    pos, neg, zero = [], [], []
    for q in qs:
        v = q.a[k]
        (pos if v > 0 else neg if v < 0 else zero).append(q)
    out = list(zero)
    for p in pos:
        for n in neg:
            sp, sn = p.a[k], -n.a[k]
            a = tuple(sn * x + sp * y for x, y in zip(p.a, n.a))
            out.append(Ineq(a, sn * p.c + sp * n.c, p.strict or n.strict))
    return _dedupe(out)


def fm_feasible(qs: Sequence[Ineq], dim: int) -> bool:
    cur = _dedupe(qs)
    for k in range(dim):
        if cur is None:
            return False
        if not cur:
            return True
        cur = fm_eliminate(cur, k)
    return cur is not None


def fm_point(qs: Sequence[Ineq], dim: int) -> list[Fraction] | None:
    """A point satisfying ``qs`` by back-substitution, or ``None``."""
    stages = [_dedupe(qs)]
    for k in range(dim):
        if stages[-1] is None:
            return None
        stages.append(fm_eliminate(stages[-1], k) if stages[-1] else [])
    if stages[-1] is None:
        return None
    x = [Fraction(0)] * dim
    for k in reversed(range(dim)):
        lo, lo_strict, hi, hi_strict = None, False, None, False
        for q in stages[k]:
            coef = q.a[k]
            if not coef:
                continue
            rest = q.c + sum(q.a[j] * x[j] for j in range(k + 1, dim))
            bound = -rest / coef
            if coef > 0:
                if lo is None or bound > lo or (bound == lo and q.strict):
                    lo, lo_strict = bound, q.strict
            else:
                if hi is None or bound < hi or (bound == hi and q.strict):
                    hi, hi_strict = bound, q.strict
        x[k] = _pick(lo, lo_strict, hi, hi_strict)
    return x


def _pick(lo, lo_strict, hi, hi_strict) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1 if hi_strict else hi
    if hi is None:
        return lo + 1 if lo_strict else lo
    if lo_strict or hi_strict:
        return (lo + hi) / 2
    return lo


# ---------------------------------------------------------------- simplex

class LPResult(NamedTuple):
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None


def simplex_max(c: Sequence, qs: Sequence[Ineq], dim: int) -> LPResult:
    """Maximise ``<c, x>`` subject to non-strict ``qs`` (strictness ignored).

    Free variables are split as ``x = x+ - x-``; phase one uses one
    artificial variable per row with negative right-hand side.
    """
    c = [Fraction(v) for v in c]
    rows = [([-v for v in q.a], q.c) for q in qs]  # -a x <= c
    m = len(rows)
    nv = 2 * dim
    # tableau columns: x+ (dim), x- (dim), slack (m), artificial (m), rhs
    ncol = nv + 2 * m + 1
    T = []
    basis = []
    for i, (a, b) in enumerate(rows):
        row = [Fraction(0)] * ncol
        sign = -1 if b < 0 else 1
        for j in range(dim):
            row[j] = sign * a[j]
            row[dim + j] = -sign * a[j]
        row[nv + i] = Fraction(sign)
        row[nv + m + i] = Fraction(1)
        row[-1] = sign * b
        T.append(row)
        basis.append(nv + m + i)
    art = set(range(nv + m, nv + 2 * m))

    def pivot(r, col):
        pr = T[r]
        inv = 1 / pr[col]
        for j in range(ncol):
            if pr[j]:
                pr[j] *= inv
        for i in range(len(T)):
            if i != r and T[i][col]:
                f = T[i][col]
                Ti = T[i]
                for j in range(ncol):
                    if pr[j]:
                        Ti[j] -= f * pr[j]
        basis[r] = col

    def run(obj, allowed):
        # obj: row of reduced costs to maximise (length ncol, last = value)
        while True:
            col = None
            for j in allowed:
                if obj[j] > 0:
                    col = j
                    break
            if col is None:
                return "optimal"
            r, best = None, None
            for i in range(m):
                if T[i][col] > 0:
                    ratio = T[i][-1] / T[i][col]
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                        r, best = i, ratio
            if r is None:
                return "unbounded"
            f = obj[col]
            pivot(r, col)
            for j in range(ncol):
                if T[r][j]:
                    obj[j] -= f * T[r][j]

    # phase one: maximise -(sum of artificials)
    obj = [Fraction(0)] * ncol
    for i in range(m):
        for j in range(ncol):
            if j not in art:
                obj[j] += T[i][j]
    run(obj, [j for j in range(ncol - 1) if j not in art])
    if obj[-1] != 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] in art:
            for j in range(nv + m):
                if T[i][j]:
                    pivot(i, j)
                    break
    allowed = list(range(nv + m))
    obj = [Fraction(0)] * ncol
    for j in range(dim):
        obj[j] = c[j]
        obj[dim + j] = -c[j]
    for i in range(m):
        b = basis[i]
        if b < ncol - 1 and obj[b]:
            f = obj[b]
            for j in range(ncol):
                if T[i][j]:
                    obj[j] -= f * T[i][j]
    status = run(obj, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    vals = [Fraction(0)] * ncol
    for i in range(m):
        vals[basis[i]] = T[i][-1]
    x = [vals[j] - vals[dim + j] for j in range(dim)]
    return LPResult("optimal", x, sum((ci * xi for ci, xi in zip(c, x)), Fraction(0)))


def simplex_point(qs: Sequence[Ineq], dim: int) -> list[Fraction] | None:
    """Feasible point honouring strict rows, via a slack-maximising LP."""
    if not any(q.strict for q in qs):
        r = simplex_max([0] * dim, qs, dim)
        return r.x if r.status == "optimal" else None
    ext = []
    for q in qs:
        if q.strict:
            ext.append(Ineq(q.a + (Fraction(-1),), q.c))
        else:
            ext.append(Ineq(q.a + (Fraction(0),), q.c))
    ext.append(Ineq((Fraction(0),) * dim + (Fraction(-1),), Fraction(1)))
    r = simplex_max([0] * dim + [1], ext, dim + 1)
    if r.status != "optimal" or r.value <= 0:
        return None
    return r.x[:dim]


# ---------------------------------------------------------------- front end

FM_MAX_DIM = 3


def feasible_point(qs: Sequence[Ineq], dim: int) -> list[Fraction] | None:
    if dim <= FM_MAX_DIM:
        return fm_point(qs, dim)
    return simplex_point(qs, dim)


def is_feasible(qs: Sequence[Ineq], dim: int) -> bool:
    if dim <= FM_MAX_DIM:
        return fm_feasible(qs, dim)
    return simplex_point(qs, dim) is not None


def remove_redundant(qs: Sequence[Ineq], dim: int) -> list[Ineq] | None:
    """Irredundant subsystem with the same solution set; ``None`` if empty."""
    cur = _dedupe(qs)
    if cur is None or not is_feasible(cur, dim):
        return None
    i = 0
    while i < len(cur):
        q = cur[i]
        others = cur[:i] + cur[i + 1:]
        neg = Ineq(tuple(-v for v in q.a), -q.c, not q.strict)
        if not is_feasible(others + [neg], dim):
            cur = others
        else:
            i += 1
    return cur


def implicit_equalities(qs: Sequence[Ineq], dim: int) -> list[int]:
    """Indices of non-strict rows that are tight on the whole (nonempty) set."""
    out = []
    for i, q in enumerate(qs):
        if q.strict:
            continue
        if not is_feasible(list(qs) + [Ineq(q.a, q.c, True)], dim):
            out.append(i)
    return out
