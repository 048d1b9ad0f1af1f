"""Slow, obviously-correct reference computations used to check the library.

Everything here works on plain lists of ``Fraction``/``int`` and shares no
code with ``sheafpair``.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd


def det_laplace(rows):
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * a * det_laplace(minor)
    return total


def rank_rowreduce(rows):
    """Row-echelon rank over QQ."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    rk, ncols = 0, len(a[0])
    for c in range(ncols):
        piv = next((i for i in range(rk, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        for i in range(rk + 1, len(a)):
            f = a[i][c] / a[rk][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[rk])]
        rk += 1
    return rk


def invariant_factors_minors(rows):
    """Integer invariant factors as quotients of successive gcds of k x k minors."""
    if not rows or not rows[0]:
        return []
    m, n = len(rows), len(rows[0])
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        d = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                d = gcd(d, int(det_laplace([[rows[i][j] for j in cs] for i in rs])))
        if d == 0:
            break
        out.append(d // prev)
        prev = d
    return out


def transpose(rows, ncols=None):
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*rows)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def same_rational_span(cols_a, cols_b):
    """Column spans agree over QQ (lists of column vectors)."""
    ra = rank_rowreduce(cols_a) if cols_a else 0
    rb = rank_rowreduce(cols_b) if cols_b else 0
    both = rank_rowreduce(list(cols_a) + list(cols_b)) if (cols_a or cols_b) else 0
    return ra == rb == both


def bilinear(g, x, y):
    return sum(x[i] * g[i][j] * y[j] for i in range(len(x)) for j in range(len(y)))
