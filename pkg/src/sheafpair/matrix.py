"""Immutable dense matrices over QQ or ZZ."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import AlgebraError, MixedRings, ShapeError
from .rings import Number, Ring


class Matrix:
    """Dense row-major matrix of exact ring elements.

    Shapes with zero rows or columns are first-class (a 0 x 3 matrix is the
    map from a rank-3 module to the zero module), so the shape is stored
    explicitly rather than inferred from the rows.
    """

    __slots__ = ("ring", "nrows", "ncols", "_rows", "_hash")

    def __init__(self, ring: Ring, rows: Iterable[Iterable], nrows: int | None = None,
                 ncols: int | None = None):
        data = tuple(tuple(ring.coerce(x) for x in row) for row in rows)
        if nrows is None:
            nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        if len(data) != nrows or any(len(r) != ncols for r in data):
            raise ShapeError(f"ragged or mis-sized matrix data for shape {nrows}x{ncols}")
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self._rows = data
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, rows: tuple, nrows: int, ncols: int) -> "Matrix":
        m = object.__new__(cls)
        m.ring = ring
        m.nrows = nrows
        m.ncols = ncols
        m._rows = rows
        m._hash = None
        return m

    @classmethod
    def from_lists(cls, ring: Ring, rows: list[list], ncols: int | None = None) -> "Matrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls._raw(ring, tuple(tuple(r) for r in rows), len(rows), ncols)

    @classmethod
    def zeros(cls, ring: Ring, nrows: int, ncols: int) -> "Matrix":
        z = ring.zero
        return cls._raw(ring, tuple((z,) * ncols for _ in range(nrows)), nrows, ncols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        z, o = ring.zero, ring.one
        return cls._raw(ring, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def diagonal(cls, ring: Ring, entries: Sequence) -> "Matrix":
        n = len(entries)
        z = ring.zero
        return cls._raw(
            ring,
            tuple(tuple(ring.coerce(entries[i]) if i == j else z for j in range(n)) for i in range(n)),
            n, n,
        )

    @classmethod
    def from_columns(cls, ring: Ring, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        for c in columns:
            if len(c) != nrows:
                raise ShapeError(f"column of length {len(c)} in a {nrows}-row matrix")
        rows = tuple(tuple(ring.coerce(c[i]) for c in columns) for i in range(nrows))
        return cls._raw(ring, rows, nrows, len(columns))

    @classmethod
    def column_vector(cls, ring: Ring, entries: Sequence) -> "Matrix":
        return cls.from_columns(ring, [entries], len(entries))

    # -- access ---------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> Number:
        i, j = ij
        return self._rows[i][j]

    def rows(self) -> tuple[tuple, ...]:
        return self._rows

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def to_lists(self) -> list[list]:
        return [list(r) for r in self._rows]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    # -- algebra --------------------------------------------------------

    def _same_ring(self, other: "Matrix") -> None:
        if self.ring is not other.ring:
            raise MixedRings(f"{self.ring!r} matrix combined with {other.ring!r} matrix")

    @property
    def T(self) -> "Matrix":
        cols = tuple(zip(*self._rows)) if self.nrows else ()
        if not cols:
            cols = tuple(() for _ in range(self.ncols))
        return Matrix._raw(self.ring, cols, self.ncols, self.nrows)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_ring(other)
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        ocols = other.T._rows
        z = self.ring.zero
        out = []
        for r in self._rows:
            out.append(tuple(sum((a * b for a, b in zip(r, c) if a and b), z) for c in ocols))
        return Matrix._raw(self.ring, tuple(out), self.nrows, other.ncols)

    def _check_shape(self, other: "Matrix") -> None:
        self._same_ring(other)
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        rows = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows))
        return Matrix._raw(self.ring, rows, self.nrows, self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        rows = tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows))
        return Matrix._raw(self.ring, rows, self.nrows, self.ncols)

    def __neg__(self) -> "Matrix":
        return Matrix._raw(self.ring, tuple(tuple(-a for a in r) for r in self._rows), self.nrows, self.ncols)

    def scale(self, c) -> "Matrix":
        c = self.ring.coerce(c)
        return Matrix._raw(self.ring, tuple(tuple(c * a for a in r) for r in self._rows), self.nrows, self.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ring is other.ring and self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.name, self.nrows, self.ncols, self._rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.ring.format(x) for x in r) for r in self._rows)
        return f"Matrix<{self.ring!r} {self.nrows}x{self.ncols}>[{body}]"

    # -- assembly -------------------------------------------------------

    def hstack(self, *others: "Matrix") -> "Matrix":
        rows = [list(r) for r in self._rows]
        ncols = self.ncols
        for o in others:
            self._same_ring(o)
            if o.nrows != self.nrows:
                raise ShapeError("hstack needs equal row counts")
            for r, extra in zip(rows, o._rows):
                r.extend(extra)
            ncols += o.ncols
        return Matrix.from_lists(self.ring, rows, ncols)

    def vstack(self, *others: "Matrix") -> "Matrix":
        rows = list(self._rows)
        for o in others:
            self._same_ring(o)
            if o.ncols != self.ncols:
                raise ShapeError("vstack needs equal column counts")
            rows.extend(o._rows)
        return Matrix._raw(self.ring, tuple(rows), len(rows), self.ncols)

    @staticmethod
    def block_diag(ring: Ring, blocks: Sequence["Matrix"]) -> "Matrix":
        nrows = sum(b.nrows for b in blocks)
        ncols = sum(b.ncols for b in blocks)
        out = [[ring.zero] * ncols for _ in range(nrows)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b._rows):
                out[r0 + i][c0:c0 + b.ncols] = row
            r0 += b.nrows
            c0 += b.ncols
        return Matrix.from_lists(ring, out, ncols)

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        rows = tuple(tuple(r[j] for j in idx) for r in self._rows)
        return Matrix._raw(self.ring, rows, self.nrows, len(idx))

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix._raw(self.ring, tuple(self._rows[i] for i in idx), len(idx), self.ncols)

    def minor_matrix(self, drop_row: int, drop_col: int) -> "Matrix":
        rows = [i for i in range(self.nrows) if i != drop_row]
        cols = [j for j in range(self.ncols) if j != drop_col]
        return self.select_rows(rows).select_columns(cols)

    # -- determinants and inverses --------------------------------------

    def det(self) -> Number:
        """Determinant by fraction-free (Bareiss) elimination; exact in both rings."""
        if not self.is_square():
            raise ShapeError("determinant of a non-square matrix")
        n = self.nrows
        if n == 0:
            return self.ring.one
        a = [list(r) for r in self._rows]
        sign = 1
        prev = self.ring.one
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return self.ring.zero
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            pivot = a[k][k]
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = a[i][j] * pivot - a[i][k] * a[k][j]
                    a[i][j] = self.ring.coerce(Fraction(num) / prev) if self.ring.is_field else num // prev
                a[i][k] = self.ring.zero
            prev = pivot
        return self.ring.coerce(sign * a[n - 1][n - 1])

    def inverse(self) -> "Matrix":
        """Inverse over the matrix's ring; over ZZ the determinant must be +-1."""
        if not self.is_square():
            raise ShapeError("inverse of a non-square matrix")
        n = self.nrows
        a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
             for i, r in enumerate(self._rows)]
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                raise AlgebraError("matrix is singular", "SINGULAR")
            a[c], a[p] = a[p], a[c]
            inv = 1 / a[c][c]
            a[c] = [x * inv for x in a[c]]
            for i in range(n):
                if i != c and a[i][c] != 0:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        rows = [r[n:] for r in a]
        if not self.ring.is_field and any(x.denominator != 1 for r in rows for x in r):
            raise AlgebraError("matrix is not invertible over ZZ", "NOT_UNIMODULAR")
        return Matrix(self.ring, rows, n, n)

    def is_unimodular(self) -> bool:
        return self.is_square() and self.ring.is_unit(self.det())

    # -- serialization --------------------------------------------------

    def to_json(self) -> list[list[str]]:
        return [[self.ring.format(x) for x in r] for r in self._rows]

    @classmethod
    def from_json(cls, ring: Ring, data, ncols: int | None = None) -> "Matrix":
        if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
            raise ValueError("matrix must be a JSON array of arrays")
        return cls(ring, [[ring.parse(x) for x in r] for r in data], len(data), ncols)

    def change_ring(self, ring: Ring) -> "Matrix":
        return Matrix(ring, self._rows, self.nrows, self.ncols)
