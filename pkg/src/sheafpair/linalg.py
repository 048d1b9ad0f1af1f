"""Exact linear algebra over a PID: Smith form, kernels, images, solving,
complements and quotients of free submodules.

Kernels are computed by column echelon reduction (RREF over QQ), never from
the Smith form, so that ``rank`` (Smith-based) and ``kernel_basis`` give two
independent routes to the dimension formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm
from typing import Sequence

from .errors import (AlgebraError, NoFactorization, NoSolution, NotASummand,
                     NotInjective, NotSurjective, ShapeError, TheoremViolation)
from .matrix import Matrix
from .rings import Ring


@dataclass(frozen=True)
class SubmoduleBasis:
    """A free submodule of ``R^ambient_rank`` given by independent generator columns."""

    ambient_rank: int
    generators: Matrix
    saturated: bool

    def __post_init__(self):
        if self.generators.nrows != self.ambient_rank:
            raise ShapeError(
                f"generators have {self.generators.nrows} rows for ambient rank {self.ambient_rank}")

    @property
    def ring(self) -> Ring:
        return self.generators.ring

    @property
    def rank(self) -> int:
        return self.generators.ncols

    def vectors(self) -> list[tuple]:
        return self.generators.columns()

    def to_json(self) -> dict:
        return {
            "ambient_rank": self.ambient_rank,
            "rank": self.rank,
            "generators": self.generators.to_json(),
            "saturated": self.saturated,
        }


# ---------------------------------------------------------------------------
# Smith normal form


def _swap_rows(a, i, j):
    a[i], a[j] = a[j], a[i]


def _swap_cols(a, i, j):
    for row in a:
        row[i], row[j] = row[j], row[i]


def _identity_lists(ring: Ring, n: int):
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


@lru_cache(maxsize=8192)
def _snf(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    ring = m.ring
    nr, nc = m.shape
    a = m.to_lists()
    u = _identity_lists(ring, nr)
    v = _identity_lists(ring, nc)

    def add_row(dst, src, f):  # row_dst += f * row_src, mirrored into u
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] != 0:
                    key = (ring.magnitude(a[i][j]), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        _, pi, pj = best
        _swap_rows(a, t, pi)
        _swap_rows(u, t, pi)
        _swap_cols(a, t, pj)
        _swap_cols(v, t, pj)

        while True:
            clean = True
            p = a[t][t]
            for i in range(t + 1, nr):
                if a[i][t] != 0:
                    q, r = ring.divmod(a[i][t], p)
                    add_row(i, t, -q)
                    clean = clean and r == 0
            for j in range(t + 1, nc):
                if a[t][j] != 0:
                    q, r = ring.divmod(a[t][j], p)
                    add_col(j, t, -q)
                    clean = clean and r == 0
            if not clean:
                # a remainder is now smaller than the pivot: move it into place
                cand = [(ring.magnitude(a[i][t]), i, t) for i in range(t + 1, nr) if a[i][t] != 0]
                cand += [(ring.magnitude(a[t][j]), t, j) for j in range(t + 1, nc) if a[t][j] != 0]
                _, ci, cj = min(cand)
                if ci != t:
                    _swap_rows(a, t, ci)
                    _swap_rows(u, t, ci)
                else:
                    _swap_cols(a, t, cj)
                    _swap_cols(v, t, cj)
                continue
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if not ring.divides(p, a[i][j])), None)
            if bad is None:
                break
            add_row(t, bad[0], ring.one)
        unit, _ = ring.canonical_associate(a[t][t])
        if unit != 1:
            inv = ring.inverse(unit)
            a[t] = [x * inv for x in a[t]]
            u[t] = [x * inv for x in u[t]]
        t += 1

    return (Matrix.from_lists(ring, u, nr), Matrix.from_lists(ring, a, nc),
            Matrix.from_lists(ring, v, nc))


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ m @ V == D`` in Smith normal form.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with ``d1 | d2 | ...``
    and each diagonal entry is its canonical associate (non-negative over ZZ,
    0 or 1 over QQ). Pivots are the nonzero entries of least magnitude, ties
    broken by lowest row, then lowest column.
    """
    return _snf(m)


def invariant_factors(m: Matrix) -> list:
    _, d, _ = _snf(m)
    return [d[i, i] for i in range(min(d.shape)) if d[i, i] != 0]


def rank(m: Matrix) -> int:
    """Number of nonzero invariant factors, i.e. the dimension of the image."""
    return len(invariant_factors(m))


def fast_rank(m: Matrix) -> int:
    """Rank by fraction-free integer elimination (rows cleared of denominators first).

    Same value as :func:`rank`; used where many large sparse systems are ranked.
    """
    rows = []
    for r in m.rows():
        if any(r):
            den = 1
            for x in r:
                den = lcm(den, x.denominator)
            rows.append([x.numerator * (den // x.denominator) for x in r])
    rk = 0
    ncols = m.ncols
    for c in range(ncols):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        p = rows[rk]
        for i in range(rk + 1, len(rows)):
            f = rows[i][c]
            if f:
                rows[i] = [a * p[c] - f * b for a, b in zip(rows[i], p)]
                g = 0
                for x in rows[i]:
                    g = gcd(g, x)
                if g > 1:
                    rows[i] = [x // g for x in rows[i]]
        rk += 1
    return rk


# ---------------------------------------------------------------------------
# Echelon forms (independent of the Smith form)


def _column_echelon(m: Matrix) -> tuple[list, list, int]:
    """Reduced column echelon form: returns lists ``(H, V, rank)`` with ``m V = H``.

    ``V`` is unimodular; the first ``rank`` columns of ``H`` are the nonzero
    ones, with strictly increasing pivot rows.
    """
    ring = m.ring
    nr, nc = m.shape
    h = m.to_lists()
    v = _identity_lists(ring, nc)

    def combine(p, j, x, y, z, w):
        # (col_p, col_j) <- (x col_p + y col_j, z col_p + w col_j)
        for mat in (h, v):
            for row in mat:
                cp, cj = row[p], row[j]
                row[p] = x * cp + y * cj
                row[j] = z * cp + w * cj

    p = 0
    for i in range(nr):
        if p == nc:
            break
        for j in range(p + 1, nc):
            b = h[i][j]
            if b == 0:
                continue
            a = h[i][p]
            g, x, y = ring.gcd_ext(a, b)
            combine(p, j, x, y, ring.exact_div(-b, g), ring.exact_div(a, g))
        piv = h[i][p]
        if piv == 0:
            continue
        unit, _ = ring.canonical_associate(piv)
        if unit != 1:
            inv = ring.inverse(unit)
            for mat in (h, v):
                for row in mat:
                    row[p] *= inv
            piv = h[i][p]
        for q in range(p):
            if h[i][q] != 0:
                f, _ = ring.divmod(h[i][q], piv)
                if f != 0:
                    for mat in (h, v):
                        for row in mat:
                            row[q] -= f * row[p]
        p += 1
    return h, v, p


def _rref_nullspace(m: Matrix) -> list[list]:
    """Nullspace basis over a field: one vector per free column, free entry 1."""
    ring = m.ring
    nr, nc = m.shape
    a = m.to_lists()
    pivots = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        vec = [ring.zero] * nc
        vec[fc] = ring.one
        for row, pc in enumerate(pivots):
            vec[pc] = -a[row][fc]
        basis.append(vec)
    return basis


def kernel_basis(m: Matrix) -> SubmoduleBasis:
    """Basis of ``{x : m x = 0}``; over ZZ a basis of the full kernel lattice."""
    ring = m.ring
    if ring.is_field:
        cols = _rref_nullspace(m)
    else:
        _, v, r = _column_echelon(m)
        cols = [[row[j] for row in v] for j in range(r, m.ncols)]
    return SubmoduleBasis(m.ncols, Matrix.from_columns(ring, cols, m.ncols), True)


def nullity(m: Matrix) -> int:
    return kernel_basis(m).rank


def is_saturated(generators: Matrix) -> bool:
    """True iff the column span is a direct summand (all invariant factors units)."""
    facs = invariant_factors(generators)
    return all(generators.ring.is_unit(d) for d in facs)


def image_basis(m: Matrix) -> SubmoduleBasis:
    """Basis of the column span (over ZZ a Hermite-style basis of the image lattice)."""
    h, _, r = _column_echelon(m)
    gens = Matrix.from_lists(m.ring, [row[:r] for row in h], r)
    return SubmoduleBasis(m.nrows, gens, is_saturated(gens))


def span(ring: Ring, vectors: Sequence[Sequence], ambient_rank: int) -> SubmoduleBasis:
    return image_basis(Matrix.from_columns(ring, list(vectors), ambient_rank))


def saturate(m: Matrix) -> SubmoduleBasis:
    """Smallest direct summand containing the columns of ``m``: ``(QQ m) cap R^n``."""
    annihilator = kernel_basis(m.T).generators
    return kernel_basis(annihilator.T)


# ---------------------------------------------------------------------------
# Solving and membership


def _as_column(ring: Ring, b) -> tuple:
    if isinstance(b, Matrix):
        if b.ncols != 1:
            raise ShapeError("right-hand side must be a single column")
        return b.column(0)
    return tuple(ring.coerce(x) for x in b)


def solve(m: Matrix, b) -> tuple:
    """Return ``x`` with ``m x == b`` over the matrix's ring.

    Raises:
        ShapeError: ``b`` does not have ``m.nrows`` entries.
        NoSolution: no solution exists over the ring (over ZZ, no integral one).
    """
    ring = m.ring
    col = _as_column(ring, b)
    if len(col) != m.nrows:
        raise ShapeError(f"right-hand side has {len(col)} entries, matrix has {m.nrows} rows")
    u, d, v = _snf(m)
    c = [sum((x * y for x, y in zip(row, col)), ring.zero) for row in u.rows()]
    y = [ring.zero] * m.ncols
    for i in range(m.nrows):
        di = d[i, i] if i < m.ncols else ring.zero
        if di == 0:
            if c[i] != 0:
                raise NoSolution("inconsistent system")
            continue
        q, r = ring.divmod(c[i], di)
        if r != 0:
            raise NoSolution("system has no solution over " + ring.name.upper())
        y[i] = q
    return tuple(sum((x * yy for x, yy in zip(row, y)), ring.zero) for row in v.rows())


def solve_columns(m: Matrix, rhs: Matrix) -> Matrix:
    cols = [solve(m, rhs.column(j)) for j in range(rhs.ncols)]
    return Matrix.from_columns(m.ring, cols, m.ncols)


def contains(sub: SubmoduleBasis | Matrix, vector) -> bool:
    gens = sub.generators if isinstance(sub, SubmoduleBasis) else sub
    try:
        solve(gens, vector)
    except NoSolution:
        return False
    return True


def contains_all(big: SubmoduleBasis | Matrix, small: SubmoduleBasis | Matrix) -> bool:
    gens = small.generators if isinstance(small, SubmoduleBasis) else small
    return all(contains(big, c) for c in gens.columns())


def same_span(a: SubmoduleBasis | Matrix, b: SubmoduleBasis | Matrix) -> bool:
    return contains_all(a, b) and contains_all(b, a)


def intersection(a: SubmoduleBasis, b: SubmoduleBasis) -> SubmoduleBasis:
    """``span(a) cap span(b)`` via the stacked kernel ``ker [A | -B]``."""
    if a.ambient_rank != b.ambient_rank:
        raise ShapeError("submodules live in different ambient modules")
    ka = a.rank
    k = kernel_basis(a.generators.hstack(-b.generators)).generators
    top = k.select_rows(range(ka))
    return image_basis(a.generators @ top)


# ---------------------------------------------------------------------------
# Complements, quotients and factorizations


def complement(s: SubmoduleBasis) -> SubmoduleBasis:
    """A free ``T`` with ``ambient = span(s) (+) span(T)``.

    Coordinate vectors are tried first, in order, so coordinate subspaces get
    coordinate complements; over ZZ a Smith-form complement is used when the
    greedy choice is not unimodular.

    Raises:
        NotASummand: ``s`` is not saturated (over ZZ).
    """
    ring = s.ring
    n = s.ambient_rank
    if not s.saturated and not is_saturated(s.generators):
        raise NotASummand("submodule is not a direct summand")
    chosen = []
    current = s.generators
    r = s.rank
    for j in range(n):
        if r == n:
            break
        e = Matrix.column_vector(ring, [int(i == j) for i in range(n)])
        trial = current.hstack(e)
        if rank(trial) > r:
            current, r = trial, r + 1
            chosen.append(j)
    if current.is_unimodular():
        gens = Matrix.from_columns(ring, [[int(i == j) for i in range(n)] for j in chosen], n)
        return SubmoduleBasis(n, gens, True)
    u, _, _ = _snf(s.generators)
    gens = u.inverse().select_columns(range(s.rank, n))
    if not s.generators.hstack(gens).is_unimodular():
        raise TheoremViolation("Smith complement is not unimodular")
    return SubmoduleBasis(n, gens, True)


def quotient_presentation(ambient_rank: int, s: SubmoduleBasis) -> tuple[Matrix, Matrix]:
    """Canonical surjection onto ``R^n / span(s)`` and a section of it.

    Returns ``(proj, lift)``: ``proj`` is ``(n-k) x n`` with kernel ``span(s)``
    and ``proj @ lift`` is the identity.
    """
    if s.ambient_rank != ambient_rank:
        raise ShapeError("submodule ambient rank differs from the module rank")
    t = complement(s)
    k = s.rank
    full = s.generators.hstack(t.generators)
    proj = full.inverse().select_rows(range(k, ambient_rank))
    return proj, t.generators


def factor_through_surjection(phi: Matrix, psi: Matrix) -> Matrix:
    """Unique ``theta`` with ``theta @ phi == psi`` for surjective ``phi``.

    Raises:
        NotSurjective: ``phi`` is not onto (over ZZ: a non-unit invariant factor).
        NoFactorization: ``ker phi`` is not contained in ``ker psi``.
    """
    if phi.ncols != psi.ncols:
        raise ShapeError("phi and psi must share their domain")
    facs = invariant_factors(phi)
    if len(facs) != phi.nrows or not all(phi.ring.is_unit(d) for d in facs):
        raise NotSurjective("phi is not surjective")
    kern = kernel_basis(phi).generators
    if not (psi @ kern).is_zero():
        raise NoFactorization("ker phi is not contained in ker psi")
    u, _, v = _snf(phi)
    right_inverse = v.select_columns(range(phi.nrows)) @ u
    theta = psi @ right_inverse
    if theta @ phi != psi:
        raise TheoremViolation("factorization through a surjection failed to reproduce psi")
    return theta


def factor_through_injection(phi: Matrix, psi: Matrix) -> Matrix:
    """Unique ``theta`` with ``phi @ theta == psi`` for injective ``phi``.

    Raises:
        NotInjective: ``phi`` has a nonzero kernel.
        NoFactorization: some column of ``psi`` is outside ``Im phi``.
    """
    if phi.nrows != psi.nrows:
        raise ShapeError("phi and psi must share their codomain")
    if rank(phi) != phi.ncols:
        raise NotInjective("phi is not injective")
    try:
        return solve_columns(phi, psi)
    except NoSolution as exc:
        raise NoFactorization("Im psi is not contained in Im phi") from exc


def dimension_formula_check(phi: Matrix) -> tuple[int, int, bool]:
    """``(rank, nullity, rank + nullity == phi.ncols)`` from independent routes."""
    r = rank(phi)
    k = nullity(phi)
    return r, k, r + k == phi.ncols


def determinant_is_unit(m: Matrix) -> bool:
    try:
        return m.is_unimodular()
    except AlgebraError:
        return False


def invariant_factors_by_minors(m: Matrix) -> list:
    """Invariant factors from determinantal divisors: ``d_k = gcd`` of the k x k minors
    and ``s_k = d_k / d_(k-1)``. Exponential in the size; meant as an oracle for
    small matrices, independent of the Smith reduction."""
    from itertools import combinations

    ring = m.ring
    out = []
    prev = ring.one
    for k in range(1, min(m.shape) + 1):
        d = ring.zero
        for rows in combinations(range(m.nrows), k):
            sub = m.select_rows(rows)
            for cols in combinations(range(m.ncols), k):
                d = ring.gcd_ext(d, sub.select_columns(cols).det())[0]
        if d == 0:
            break
        out.append(ring.canonical_associate(ring.exact_div(d, prev))[1])
        prev = d
    return out
