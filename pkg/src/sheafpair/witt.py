"""Hyperbolic planes around a totally isotropic submodule of a symplectic module.

Everything is computed over the whole space in global coordinates; on a
connected space the free module has identity restrictions, so the planes over
smaller opens are the restrictions of the global ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import (DegenerateForm, DegenerateGram, DisconnectedSpace, IsotropicInput,
                     NoUnitPartner, NotASummand, NotIsotropic, NotOrthosymmetric, ShapeError,
                     NoSolution, TheoremViolation)
from .linalg import (SubmoduleBasis, complement, contains, image_basis, kernel_basis, rank,
                     same_span, solve)
from .matrix import Matrix
from .pairing import Pairing, as_subsheaf, is_nondegenerate, radical
from .report import Report
from .topology import is_connected


@dataclass(frozen=True)
class HyperbolicPlane:
    r: tuple
    s: tuple
    c: object

    def to_json(self, ring) -> dict:
        return {"r": [ring.format(x) for x in self.r], "s": [ring.format(x) for x in self.s],
                "c": ring.format(self.c)}


@dataclass(frozen=True)
class WittResult:
    planes: list[HyperbolicPlane]
    residual: SubmoduleBasis
    by_open: dict = field(default_factory=dict, compare=False)

    @property
    def k(self) -> int:
        return len(self.planes)

    def basis(self) -> Matrix:
        """``[r1 s1 ... rk sk | residual]`` as columns."""
        ring = self.residual.ring
        n = self.residual.ambient_rank
        cols = [v for p in self.planes for v in (p.r, p.s)]
        return Matrix.from_columns(ring, cols, n).hstack(self.residual.generators)

    def to_json(self, verified: bool | None = None) -> dict:
        ring = self.residual.ring
        out = {"planes": [p.to_json(ring) for p in self.planes],
               "residual": self.residual.generators.to_json()}
        if verified is not None:
            out["verified"] = verified
        return out


def _form(g: Matrix, x: Sequence, y: Sequence):
    ring = g.ring
    total = ring.zero
    for i, a in enumerate(x):
        if a:
            row = g.row(i)
            total += a * sum((row[j] * b for j, b in enumerate(y) if b), ring.zero)
    return total


def find_partner(p: Pairing, r: Sequence, basis: Sequence[Sequence]) -> tuple[tuple, object]:
    """Cofactor partner of ``r`` in a basis on which the form is nondegenerate.

    With ``D = B^T G B`` (``B`` the basis, ``r`` moved to the front) the section
    ``s = sum_i (-1)^(1+i) det D_{1i} r_i`` satisfies ``phi(r, s) = det D``.

    Raises:
        ShapeError: ``r`` is not one of the basis vectors.
        DegenerateGram: ``det D`` is not a unit.
    """
    ring = p.ring
    g = p.top_gram
    r = tuple(ring.coerce(x) for x in r)
    vecs = [tuple(ring.coerce(x) for x in v) for v in basis]
    if r not in vecs:
        raise ShapeError("r must be one of the basis vectors")
    vecs.remove(r)
    vecs.insert(0, r)
    n = g.nrows
    b = Matrix.from_columns(ring, vecs, n)
    d = b.T @ g @ b
    det = d.det()
    if not ring.is_unit(det):
        raise DegenerateGram(f"Gram on the basis has determinant {ring.format(det)}, not a unit")
    s = [ring.zero] * n
    for i, v in enumerate(vecs):
        cof = d.minor_matrix(0, i).det() if d.nrows > 1 else ring.one
        if i % 2:
            cof = -cof
        if cof:
            s = [a + cof * x for a, x in zip(s, v)]
    s = tuple(s)
    c = _form(g, r, s)
    if c != det:
        raise TheoremViolation("phi(r, s) differs from det D")
    return s, c


def split_nonisotropic(p: Pairing, sub) -> tuple[SubmoduleBasis, SubmoduleBasis]:
    """``E = S (+) S^perp`` for a submodule on which the form is nondegenerate.

    Raises:
        IsotropicInput: the Gram matrix restricted to ``S`` is not invertible
            (over ZZ: not unimodular).
    """
    gens = sub.generators if isinstance(sub, SubmoduleBasis) else sub
    g = p.top_gram
    if gens.nrows != g.nrows:
        raise ShapeError("submodule and pairing have different ambient ranks")
    s = image_basis(gens)
    restricted = s.generators.T @ g @ s.generators
    if not restricted.is_unimodular():
        raise IsotropicInput("the form restricted to S is degenerate (rad S != 0)")
    perp = kernel_basis(s.generators.T @ g)
    if not s.generators.hstack(perp.generators).is_unimodular():
        raise TheoremViolation("S and S^perp do not span E")
    return s, perp


def _restrict_within(g: Matrix, w: Matrix, conds: list[tuple]) -> Matrix:
    """Columns spanning ``{x in span(w) : phi(c, x) = 0 for c in conds}``."""
    if not conds:
        return w
    ring = g.ring
    rows = Matrix.from_columns(ring, list(conds), g.nrows).T @ g @ w
    return w @ kernel_basis(rows).generators


def _gauge(ring, w: Matrix, r: tuple) -> list[tuple]:
    """A basis of ``span(w)`` whose first vector is ``r``."""
    a = solve(w, r)
    comp = complement(image_basis(Matrix.column_vector(ring, a)))
    return [r] + [(w @ Matrix.column_vector(ring, c)).column(0) for c in comp.vectors()]


def _unit_partner(g: Matrix, r: tuple, cand: Matrix):
    """First candidate column pairing to a unit with ``r``; failing that (over ZZ)
    the Bezout combination of all candidates when their values have unit gcd."""
    ring = g.ring
    values = [_form(g, r, cand.column(j)) for j in range(cand.ncols)]
    for j, val in enumerate(values):
        if val != 0 and ring.is_unit(val):
            return cand.column(j), val
    if ring.is_field:
        return None, None
    d, coeffs = ring.zero, []
    for val in values:
        d, x, y = ring.gcd_ext(d, val)
        coeffs = [x * a for a in coeffs] + [y]
    if not ring.is_unit(d):
        return None, None
    s = (cand @ Matrix.column_vector(ring, coeffs)).column(0)
    return s, _form(g, r, s)


def hyperbolic_decomposition(p: Pairing, iso) -> WittResult:
    """Extend a totally isotropic ``F = span(r1..rk)`` to ``H1 ⊥ ... ⊥ Hk ⊥ residual``.

    Planes are split off last-first: ``Hk`` is found inside the whole module,
    ``H_{k-1}`` inside ``Hk^perp`` and so on. The partner of ``r_i`` is the first
    basis vector of ``{x in W : phi(r_j, x) = 0, j < i}`` pairing to a unit with
    ``r_i`` (over ZZ, a Bezout combination of those basis vectors if none does);
    the last step uses the cofactor partner of a basis starting with ``r1``.
    Each partner is scaled so that ``phi(r_i, s_i) = 1``.

    Raises:
        DisconnectedSpace: the underlying space is not connected.
        NotOrthosymmetric: the pairing is not a skew self-pairing.
        NotIsotropic: ``rad F != F``.
        DegenerateForm: the form has a nonzero kernel.
        NoUnitPartner: over ZZ, no candidate pairs to a unit with ``r_i``.
    """
    space = p.space
    ring = p.ring
    if not is_connected(space):
        raise DisconnectedSpace("the decomposition is defined on connected spaces")
    if "skew" not in p.flags or not p.is_self:
        raise NotOrthosymmetric("a skew self-pairing is required")
    g = p.top_gram
    n = g.nrows
    gens = iso.generators if isinstance(iso, SubmoduleBasis) else iso
    if gens.nrows != n:
        raise ShapeError("F and the pairing have different ambient ranks")
    if rank(gens) != gens.ncols:
        raise ShapeError("generators of F are not independent")
    f_sub = as_subsheaf(p.E, gens)
    rad = radical(p, f_sub)
    if not all(same_span(rad[u], f_sub[u]) for u in f_sub):
        raise NotIsotropic("F is not totally isotropic")
    if not is_nondegenerate(p):
        raise DegenerateForm("the form has a nonzero kernel")

    rs = gens.columns()
    k = len(rs)
    w = Matrix.identity(ring, n)
    found: dict[int, HyperbolicPlane] = {}
    for i in range(k - 1, -1, -1):
        r = rs[i]
        if i == 0:
            try:
                basis = _gauge(ring, w, r)
                s, c = find_partner(p, r, basis)
            except (NotASummand, DegenerateGram, NoSolution) as exc:
                raise NoUnitPartner(f"no unit partner for r1: {exc}") from exc
        else:
            cand = _restrict_within(g, w, list(rs[:i]))
            s, c = _unit_partner(g, r, cand)
            if s is None:
                raise NoUnitPartner(f"no section pairs to a unit with r{i + 1}")
        inv = ring.inverse(c)
        s = tuple(inv * x for x in s)
        found[i] = HyperbolicPlane(tuple(r), s, ring.one)
        w = _restrict_within(g, w, [tuple(r), s])

    planes = [found[i] for i in range(k)]
    residual = image_basis(w) if w.ncols else SubmoduleBasis(n, Matrix.zeros(ring, n, 0), True)
    by_open = {}
    top = space.top
    for u in range(len(space.opens)):
        res = p.E.restrict(top, u)
        by_open[u] = [HyperbolicPlane((res @ Matrix.column_vector(ring, pl.r)).column(0) if res.nrows else (),
                                      (res @ Matrix.column_vector(ring, pl.s)).column(0) if res.nrows else (),
                                      pl.c) for pl in planes]
    return WittResult(planes, residual, by_open)


def verify_witt(p: Pairing, iso, result: WittResult) -> Report:
    """Re-check a decomposition from scratch; the report is truthy iff it holds.

    Checks each plane's Gram is ``[[0, c], [-c, 0]]`` with ``c`` a unit, the planes
    and the residual are mutually orthogonal, every generator of ``F`` lies in
    exactly one plane with the assignment a bijection, and ``[planes | residual]``
    is a basis of ``E`` (unit determinant).
    """
    rep = Report()
    ring = p.ring
    g = p.top_gram
    n = g.nrows
    planes = result.planes
    for idx, pl in enumerate(planes):
        if len(pl.r) != n or len(pl.s) != n:
            rep.add("SHAPE", f"plane {idx + 1} has sections of the wrong length", idx)
            return rep
        block = [[_form(g, pl.r, pl.r), _form(g, pl.r, pl.s)],
                 [_form(g, pl.s, pl.r), _form(g, pl.s, pl.s)]]
        c = block[0][1]
        if block[0][0] != 0 or block[1][1] != 0 or block[1][0] != -c:
            rep.add("PLANE_GRAM", f"plane {idx + 1} Gram is not of the form [[0,c],[-c,0]]", idx)
        if c == 0 or not ring.is_unit(c):
            rep.add("PLANE_DEGENERATE", f"plane {idx + 1} pairs r and s to a non-unit", idx)
        elif ring.coerce(pl.c) != c:
            rep.add("PLANE_VALUE", f"plane {idx + 1} records c={ring.format(pl.c)}, actual "
                                   f"{ring.format(c)}", idx)
    for a in range(len(planes)):
        for b in range(a + 1, len(planes)):
            pa, pb = planes[a], planes[b]
            if any(_form(g, x, y) for x in (pa.r, pa.s) for y in (pb.r, pb.s)):
                rep.add("PLANES_NOT_ORTHOGONAL", f"planes {a + 1} and {b + 1} are not orthogonal", a, b)
    res = result.residual
    if res.ambient_rank != n:
        rep.add("SHAPE", "residual lives in the wrong ambient module")
        return rep
    for idx, pl in enumerate(planes):
        for y in res.vectors():
            if _form(g, pl.r, y) or _form(g, pl.s, y):
                rep.add("RESIDUAL_NOT_ORTHOGONAL", f"residual is not orthogonal to plane {idx + 1}", idx)
                break

    gens = iso.generators if isinstance(iso, SubmoduleBasis) else iso
    if gens.ncols != len(planes):
        rep.add("PLANE_COUNT", f"{len(planes)} planes for an isotropic submodule of rank {gens.ncols}")
    else:
        homes = []
        for i, f in enumerate(gens.columns()):
            inside = [j for j, pl in enumerate(planes)
                      if contains(Matrix.from_columns(ring, [pl.r, pl.s], n), f)]
            if len(inside) != 1:
                rep.add("MEMBERSHIP", f"generator {i + 1} of F lies in {len(inside)} planes", i)
            homes.extend(inside[:1])
        if len(set(homes)) != len(homes):
            rep.add("MEMBERSHIP", "two generators of F lie in the same plane")

    if 2 * len(planes) + res.rank != n:
        rep.add("RANK", f"2*{len(planes)} + {res.rank} != {n}")
    elif rep.ok:
        b = result.basis()
        if not b.is_unimodular():
            rep.add("NOT_A_BASIS", "planes and residual do not form a basis of E")
        else:
            blocks = b.T @ g @ b
            expected = Matrix.block_diag(ring, [Matrix.from_lists(ring, [[0, pl.c], [-pl.c, 0]])
                                                for pl in planes]
                                         + [res.generators.T @ g @ res.generators])
            if blocks != expected:
                rep.add("CONGRUENCE", "B^T G B is not the orthogonal sum of the pieces")
    return rep


def residual_pairing(p: Pairing, result: WittResult) -> Matrix:
    """Gram matrix of the form on the residual summand."""
    r = result.residual.generators
    return r.T @ p.top_gram @ r
