"""Pure-Python reference kernels.

These are the fallbacks for the compiled ``_ckernels`` extension and define
its contract: every function takes and returns plain Python ints.
"""

from __future__ import annotations

from math import gcd


def int_rank(a: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination (mutates ``a``)."""
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    r = 0
    for c in range(ncols):
        piv = -1
        for i in range(r, nrows):
            if a[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r]
        p = pr[c]
        for i in range(r + 1, nrows):
            ai = a[i]
            f = ai[c]
            if f:
                for j in range(c, ncols):
                    ai[j] = ai[j] * p - f * pr[j]
                _shrink(ai)
        r += 1
        if r == nrows:
            break
    return r


def _shrink(row: list[int]) -> None:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return
    if g > 1:
        for j in range(len(row)):
            row[j] //= g


def snf_diagonal(a: list[list[int]]) -> list[int]:
    """Nonzero Smith invariants of an integer matrix (mutates ``a``)."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    t = 0
    while t < rows and t < cols:
        best = 0
        bi = bj = -1
        for i in range(t, rows):
            ai = a[i]
            for j in range(t, cols):
                x = ai[j]
                if x:
                    ax = x if x > 0 else -x
                    if best == 0 or ax < best:
                        best, bi, bj = ax, i, j
                        if ax == 1:
                            break
            if best == 1:
                break
        if best == 0:
            break
        a[t], a[bi] = a[bi], a[t]
        if bj != t:
            for row in a:
                row[t], row[bj] = row[bj], row[t]
        while True:
            p = a[t][t]
            moved = False
            for i in range(t + 1, rows):
                x = a[i][t]
                if x:
                    q = x // p
                    ai, at = a[i], a[t]
                    for j in range(t, cols):
                        ai[j] -= q * at[j]
                    if ai[t]:
                        a[t], a[i] = a[i], a[t]
                        moved = True
                        break
            if moved:
                continue
            at = a[t]
            for j in range(t + 1, cols):
                x = at[j]
                if x:
                    q = x // p
                    for row in a:
                        row[j] -= q * row[t]
                    if at[j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        moved = True
                        break
            if moved:
                continue
            bad = -1
            for i in range(t + 1, rows):
                ai = a[i]
                for j in range(t + 1, cols):
                    if ai[j] % p:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            at, ab = a[t], a[bad]
            for j in range(t, cols):
                at[j] += ab[j]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


# ---------------------------------------------------------------- linear systems

def solve_int(rows: list[list[int]], ncols: int):
    """Solve an augmented integer system ``[A | b]`` (mutates ``rows``).

    Returns ``None`` when inconsistent, else ``(den, x0, kernel)``: every
    solution is ``x0/den + sum(c_k * kernel[k])`` with integer ``x0`` and
    primitive integer kernel vectors.
    """
    m = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if rows[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        if pr[c] < 0:
            for j in range(ncols + 1):
                pr[j] = -pr[j]
        p = pr[c]
        for i in range(m):
            if i == r:
                continue
            ri = rows[i]
            f = ri[c]
            if not f:
                continue
            g = gcd(p, f)
            a, b = p // g, f // g
            for j in range(ncols + 1):
                ri[j] = a * ri[j] - b * pr[j]
            _shrink(ri)
        _shrink(pr)
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if rows[i][ncols]:
            return None
    den = 1
    for i in range(r):
        pv = rows[i][pivots[i]]
        den = den * pv // gcd(den, pv)
    x0 = [0] * ncols
    for i in range(r):
        x0[pivots[i]] = rows[i][ncols] * (den // rows[i][pivots[i]])
    pivset = set(pivots)
    kernel = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = den
        for i in range(r):
            v[pivots[i]] = -rows[i][f] * (den // rows[i][pivots[i]])
        _shrink(v)
        kernel.append(v)
    return den, x0, kernel


# ---------------------------------------------------------------- inequalities
#
# A row is a tuple ``(a_0, ..., a_{d-1}, c, strict)`` of ints meaning
# ``a.x + c >= 0`` (``> 0`` when ``strict`` is 1).

def _dedupe(rows, dim: int):
    """Normalised, tautology-free, parallel-reduced rows; ``None`` on a contradiction."""
    best = {}
    for row in rows:
        g = 0
        for j in range(dim):
            if row[j]:
                g = gcd(g, row[j])
        c, strict = row[dim], row[dim + 1]
        if g == 0:
            if c < 0 or (strict and c == 0):
                return None
            continue
        key = tuple(row[j] // g for j in range(dim))
        old = best.get(key)
        # bound -c/g: keep the smallest c/g, strict on ties
        if old is None:
            best[key] = (c, g, strict)
        else:
            oc, og, os_ = old
            lhs, rhs = c * og, oc * g
            if lhs < rhs or (lhs == rhs and strict and not os_):
                best[key] = (c, g, strict)
    out = []
    for key, (c, g, strict) in best.items():
        h = gcd(g, c)
        out.append(tuple(x * (g // h) for x in key) + (c // h, strict))
    return out


def _eliminate(rows, dim: int, k: int):
    pos, neg, out = [], [], []
    for row in rows:
        v = row[k]
        if v > 0:
            pos.append(row)
        elif v < 0:
            neg.append(row)
        else:
            out.append(row)
    for p in pos:
        sp = p[k]
        for q in neg:
            sn = -q[k]
            g = gcd(sp, sn)
            a, b = sn // g, sp // g
            new = [a * p[j] + b * q[j] for j in range(dim + 1)]
            new[k] = 0
            new.append(p[dim + 1] | q[dim + 1])
            out.append(tuple(new))
    return _dedupe(out, dim)


def fm_feasible_int(rows, dim: int) -> bool:
    """Fourier-Motzkin feasibility of integer rows in ``dim`` variables."""
    cur = _dedupe(rows, dim)
    live = set(range(dim))
    while cur:
        bk = -1
        best = 0
        for k in live:
            np = nn = 0
            for row in cur:
                if row[k] > 0:
                    np += 1
                elif row[k] < 0:
                    nn += 1
            cost = np * nn - np - nn
            if bk < 0 or cost < best:
                best, bk = cost, k
        if bk < 0:
            break
        live.discard(bk)
        cur = _eliminate(cur, dim, bk)
    return cur is not None


def reduce_ineqs_int(rows, dim: int):
    """Irredundant subsystem with the same solution set, or ``None`` if empty."""
    cur = _dedupe(rows, dim)
    if cur is None or not fm_feasible_int(cur, dim):
        return None
    i = 0
    while i < len(cur):
        row = cur[i]
        others = cur[:i] + cur[i + 1:]
        neg = tuple(-row[j] for j in range(dim + 1)) + (1 - row[dim + 1],)
        if fm_feasible_int(others + [neg], dim):
            i += 1
        else:
            cur = others
    return cur
