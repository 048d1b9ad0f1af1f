"""Seeded random instances for the verification suites.

Entries are drawn with numerators and denominators in ``[-9, 9]``
(denominators positive), which keeps exact growth small.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .linalg import image_basis, saturate
from .matrix import Matrix
from .rings import ZZ, Ring

BOUND = 9


def scalar(rng: random.Random, ring: Ring):
    num = rng.randint(-BOUND, BOUND)
    if ring is ZZ:
        return num
    return Fraction(num, rng.randint(1, BOUND))


def matrix(rng: random.Random, ring: Ring, nrows: int, ncols: int, density: float = 1.0) -> Matrix:
    rows = [[scalar(rng, ring) if rng.random() < density else 0 for _ in range(ncols)]
            for _ in range(nrows)]
    return Matrix(ring, rows, nrows, ncols)


def invertible(rng: random.Random, ring: Ring, n: int) -> Matrix:
    """Random matrix with unit determinant (over ZZ: a product of elementary moves)."""
    if ring is ZZ:
        rows = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(3 * n):
            if n < 2:
                break
            i, j = rng.sample(range(n), 2)
            f = rng.randint(-2, 2)
            rows[i] = [a + f * b for a, b in zip(rows[i], rows[j])]
        if n and rng.random() < 0.5:
            rows[0] = [-a for a in rows[0]]
        return Matrix(ring, rows, n, n)
    while True:
        m = matrix(rng, ring, n, n)
        if m.det() != 0:
            return m


def saturated_submodule(rng: random.Random, ring: Ring, n: int, k: int | None = None) -> Matrix:
    """Generators of a random saturated submodule of rank at most ``k`` in ``R^n``."""
    if k is None:
        k = rng.randint(0, n)
    if k == 0:
        return Matrix.zeros(ring, n, 0)
    gens = matrix(rng, ring, n, k)
    return saturate(gens).generators if ring is ZZ else image_basis(gens).generators


def complementary_pair(rng: random.Random, ring: Ring, n: int) -> tuple[Matrix, Matrix]:
    b = invertible(rng, ring, n)
    k = rng.randint(0, n)
    return b.select_columns(range(k)), b.select_columns(range(k, n))


def low_rank(rng: random.Random, ring: Ring, nrows: int, ncols: int, r: int) -> Matrix:
    if r == 0:
        return Matrix.zeros(ring, nrows, ncols)
    return matrix(rng, ring, nrows, r) @ matrix(rng, ring, r, ncols)


def degenerate_gram(rng: random.Random, ring: Ring, max_rank: int) -> Matrix:
    """A Gram matrix with at least one nonzero kernel (rank below ``min(m, n)``)."""
    m = rng.randint(1, max_rank)
    n = rng.randint(1, max_rank)
    return low_rank(rng, ring, m, n, rng.randint(0, min(m, n) - 1))


def skew(rng: random.Random, ring: Ring, n: int) -> Matrix:
    a = matrix(rng, ring, n, n)
    return a - a.T


def nondegenerate_skew(rng: random.Random, ring: Ring, n: int) -> Matrix:
    """Random invertible skew matrix of even size ``n``."""
    if n % 2:
        raise ValueError("a nondegenerate skew form needs even rank")
    while True:
        g = skew(rng, ring, n)
        if n == 0 or g.det() != 0:
            return g


def standard_symplectic(ring: Ring, half: int) -> Matrix:
    """``J`` with blocks ``[[0, 1], [-1, 0]]`` on the diagonal."""
    plane = Matrix.from_lists(ring, [[0, 1], [-1, 0]])
    if half == 0:
        return Matrix.zeros(ring, 0, 0)
    return Matrix.block_diag(ring, [plane] * half)


def symplectic_change(rng: random.Random, gram: Matrix, steps: int | None = None) -> Matrix:
    """Product of random transvections ``x -> x + c phi(v, x) v``; each preserves ``phi``."""
    ring = gram.ring
    n = gram.nrows
    t = Matrix.identity(ring, n)
    for _ in range(steps if steps is not None else n):
        v = Matrix.column_vector(ring, [rng.randint(-2, 2) for _ in range(n)])
        c = rng.choice([-1, 1]) if ring is ZZ else Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        # x -> x + c v (v^T G x)
        step = Matrix.identity(ring, n) + (v @ (v.T @ gram)).scale(c)
        t = step @ t
    return t


def isotropic_instance(rng: random.Random, ring: Ring, half: int, k: int | None = None
                       ) -> tuple[Matrix, Matrix]:
    """Standard symplectic Gram of rank ``2*half`` and a random totally isotropic
    submodule of rank ``k``: the image of ``span{e1, e3, ...}`` under a random
    symplectic change of basis."""
    g = standard_symplectic(ring, half)
    if k is None:
        k = rng.randint(0, half)
    n = 2 * half
    base = Matrix.from_columns(ring, [[int(i == 2 * j) for i in range(n)] for j in range(k)], n)
    t = symplectic_change(rng, g)
    return g, t @ base

