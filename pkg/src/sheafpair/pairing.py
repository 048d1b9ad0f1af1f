"""Bilinear pairings of free sheaf modules as restriction-compatible Gram families.

For a pairing ``(F, E; phi)`` the Gram matrix over ``U`` has shape
``rank_E(U) x rank_F(U)`` and ``phi_U(s, t) = s^T gram(U) t``. Sub-sheaves are
dictionaries ``{open index: SubmoduleBasis}``; a bare basis or matrix is read
as sections over the whole space and restricted to every open.

Naming follows the two orthogonals of the theory:

* the right orthogonal of ``G <= E`` lives in ``F``: ``{t : phi(G, t) = 0}``;
* the left orthogonal of ``H <= F`` lives in ``E``: ``{s : phi(s, H) = 0}``.

The right/left kernels of the pairing are the orthogonals of the full modules.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import (FlagMismatch, NotADecomposition, NotASummand, NotOrthosymmetric,
                     ShapeError, TheoremViolation, AlgebraError)
from .linalg import (SubmoduleBasis, image_basis, intersection, invariant_factors,
                     is_saturated, kernel_basis, quotient_presentation, rank, same_span)
from .matrix import Matrix
from .report import Report
from .sheaf import SheafModule

FLAGS = ("symmetric", "skew")


class Side(enum.Enum):
    LEFT_TOP = "left_top"        # a submodule of E, orthogonal to something in F
    RIGHT_PERP = "right_perp"    # a submodule of F, orthogonal to something in E


SubSheaf = Mapping[int, SubmoduleBasis]
SubInput = Union[SubmoduleBasis, Matrix, Mapping[int, Union[SubmoduleBasis, Matrix]]]


@dataclass(frozen=True)
class OrthogonalResult:
    side: Side
    parts: Mapping[int, SubmoduleBasis] = field(hash=False)

    def __getitem__(self, u: int) -> SubmoduleBasis:
        return self.parts[u]

    def ranks(self) -> dict[int, int]:
        return {u: b.rank for u, b in self.parts.items()}

    def is_zero(self) -> bool:
        return all(b.rank == 0 for b in self.parts.values())

    def to_json(self) -> dict:
        return {"side": self.side.value,
                "parts": {str(u): b.to_json() for u, b in sorted(self.parts.items())}}


def same_module(a: SheafModule, b: SheafModule) -> bool:
    return a is b or (a.space == b.space and a.ring is b.ring and a.ranks == b.ranks
                      and dict(a.restrictions) == dict(b.restrictions))


@dataclass(frozen=True)
class Pairing:
    E: SheafModule
    F: SheafModule
    gram: Mapping[int, Matrix] = field(hash=False)
    flags: frozenset = frozenset()

    @classmethod
    def constant(cls, E: SheafModule, F: SheafModule, gram: Matrix,
                 flags=()) -> "Pairing":
        """Same Gram matrix on every nonempty open (for free modules of constant rank)."""
        grams = {}
        for u in range(len(E.space.opens)):
            if E.space.opens[u]:
                grams[u] = gram
            else:
                grams[u] = Matrix.zeros(E.ring, E.ranks[u], F.ranks[u])
        return cls(E, F, grams, frozenset(flags))

    @classmethod
    def on_free(cls, gram: Matrix, space=None, flags=()) -> "Pairing":
        """Pairing of free modules on ``space`` (default a point); square Grams give self-pairings."""
        from .topology import indiscrete
        space = space or indiscrete(1)
        E = SheafModule.free(space, gram.ring, gram.nrows)
        F = E if gram.is_square() else SheafModule.free(space, gram.ring, gram.ncols)
        return cls.constant(E, F, gram, flags)

    @property
    def ring(self):
        return self.E.ring

    @property
    def space(self):
        return self.E.space

    @property
    def is_self(self) -> bool:
        return same_module(self.E, self.F)

    @property
    def top_gram(self) -> Matrix:
        return self.gram[self.space.top]

    def value(self, u: int, s, t):
        g = self.gram[u]
        return sum((a * g[i, j] * b for i, a in enumerate(s) for j, b in enumerate(t) if a and b),
                   self.ring.zero)

    def to_json(self) -> dict:
        return {"gram": {str(u): g.to_json() for u, g in sorted(self.gram.items())},
                "flags": sorted(self.flags)}


# ---------------------------------------------------------------------------
# sub-sheaf plumbing


def as_subsheaf(module: SheafModule, sub: SubInput) -> dict[int, SubmoduleBasis]:
    """Normalize a submodule argument to ``{open: SubmoduleBasis}``."""
    space = module.space
    if isinstance(sub, Mapping):
        out = {}
        for u in range(len(space.opens)):
            part = sub.get(u)
            if part is None:
                raise ShapeError(f"no submodule given over open {space.label(u)}")
            if isinstance(part, Matrix):
                part = image_basis(part)
            if part.ambient_rank != module.ranks[u]:
                raise ShapeError(f"submodule over {space.label(u)} has ambient rank "
                                 f"{part.ambient_rank}, module has rank {module.ranks[u]}")
            out[u] = part
        return out
    gens = sub.generators if isinstance(sub, SubmoduleBasis) else sub
    top = space.top
    if gens.nrows != module.ranks[top]:
        raise ShapeError(f"generators have {gens.nrows} rows, module has rank {module.ranks[top]}")
    return {v: image_basis(module.restrict(top, v) @ gens) for v in range(len(space.opens))}


def full_subsheaf(module: SheafModule) -> dict[int, SubmoduleBasis]:
    return {u: SubmoduleBasis(r, Matrix.identity(module.ring, r), True)
            for u, r in enumerate(module.ranks)}


def zero_subsheaf(module: SheafModule) -> dict[int, SubmoduleBasis]:
    return {u: SubmoduleBasis(r, Matrix.zeros(module.ring, r, 0), True)
            for u, r in enumerate(module.ranks)}


# ---------------------------------------------------------------------------
# validation


def validate_pairing(p: Pairing) -> Report:
    """Shapes, ``res_E^T gram(V) res_F = gram(U)`` for nonempty ``V <= U``, and declared flags."""
    rep = Report()
    space = p.space
    if p.F.space != space:
        rep.add("SPACE", "E and F live on different spaces")
        return rep
    for u in range(len(space.opens)):
        g = p.gram.get(u)
        if g is None:
            rep.add("MISSING_GRAM", f"no Gram matrix over {space.label(u)}", u)
        elif g.shape != (p.E.ranks[u], p.F.ranks[u]):
            rep.add("SHAPE", f"Gram over {space.label(u)} has shape {g.shape}, expected "
                             f"{(p.E.ranks[u], p.F.ranks[u])}", u)
    if not rep.ok:
        return rep
    for u, v in space.inclusions():
        if u == v or not space.opens[v]:
            continue  # scalars over the empty set are zero
        try:
            pulled = p.E.restrict(u, v).T @ p.gram[v] @ p.F.restrict(u, v)
        except AlgebraError as exc:
            rep.add("MISSING_RESTRICTION", str(exc), u, v)
            continue
        if pulled != p.gram[u]:
            rep.add("COMPATIBILITY", f"Gram over {space.label(v)} pulled back to {space.label(u)} "
                                     f"differs from the Gram over {space.label(u)}", u, v)
    for flag in sorted(p.flags):
        if flag not in FLAGS:
            rep.add("UNKNOWN_FLAG", f"unknown flag {flag!r}")
            continue
        if not p.is_self:
            rep.add("FLAG", f"{flag} flag on a pairing of two different modules")
            continue
        for u, g in sorted(p.gram.items()):
            target = g if flag == "symmetric" else -g
            if g.T != target:
                rep.add("FLAG", f"Gram over {space.label(u)} is not {flag}", u)
    return rep


# ---------------------------------------------------------------------------
# orthogonals, kernels, radicals


def _right_orthogonal_at(p: Pairing, sub: SubSheaf, u: int) -> SubmoduleBasis:
    # t in F(U) with phi_V(G(V), t|V) = 0 for every open V <= U
    space = p.space
    blocks = [sub[v].generators.T @ p.gram[v] @ p.F.restrict(u, v) for v in space.opens_within(u)]
    return kernel_basis(Matrix.zeros(p.ring, 0, p.F.ranks[u]).vstack(*blocks))


def _left_orthogonal_at(p: Pairing, sub: SubSheaf, u: int) -> SubmoduleBasis:
    space = p.space
    blocks = [sub[v].generators.T @ p.gram[v].T @ p.E.restrict(u, v) for v in space.opens_within(u)]
    return kernel_basis(Matrix.zeros(p.ring, 0, p.E.ranks[u]).vstack(*blocks))


def orthogonal(p: Pairing, sub: SubInput, within: str = "E") -> OrthogonalResult:
    """Orthogonal of a submodule.

    ``within="E"``: ``sub <= E`` and the result ``{t in F : phi(sub, t) = 0}``.
    ``within="F"``: ``sub <= F`` and the result ``{s in E : phi(s, sub) = 0}``.
    """
    if within == "E":
        s = as_subsheaf(p.E, sub)
        return OrthogonalResult(Side.RIGHT_PERP,
                                {u: _right_orthogonal_at(p, s, u) for u in range(len(p.space.opens))})
    if within == "F":
        s = as_subsheaf(p.F, sub)
        return OrthogonalResult(Side.LEFT_TOP,
                                {u: _left_orthogonal_at(p, s, u) for u in range(len(p.space.opens))})
    raise ValueError("within must be 'E' or 'F'")


def right_kernel(p: Pairing) -> OrthogonalResult:
    """``E^perp``: sections of F orthogonal to all of E."""
    return orthogonal(p, full_subsheaf(p.E), "E")


def left_kernel(p: Pairing) -> OrthogonalResult:
    """``F^top``: sections of E orthogonal to all of F."""
    return orthogonal(p, full_subsheaf(p.F), "F")


def radical(p: Pairing, sub: SubInput | None = None) -> OrthogonalResult:
    """``rad S = S cap S^perp`` for an orthosymmetric self-pairing (default ``S = E``).

    Raises:
        NotOrthosymmetric: neither the symmetric nor the skew flag is declared.
    """
    if not p.flags & set(FLAGS) or not p.is_self:
        raise NotOrthosymmetric("radical needs a self-pairing flagged symmetric or skew")
    s = full_subsheaf(p.E) if sub is None else as_subsheaf(p.E, sub)
    perp = orthogonal(p, s, "E")
    return OrthogonalResult(Side.LEFT_TOP, {u: intersection(s[u], perp[u]) for u in s})


def is_nondegenerate(p: Pairing) -> bool:
    """Both kernels vanish on every open (kernel-based, so ``[[2]]`` over ZZ qualifies)."""
    return right_kernel(p).is_zero() and left_kernel(p).is_zero()


def is_unimodular(p: Pairing) -> bool:
    """Stricter than :func:`is_nondegenerate`: every Gram is square with unit determinant."""
    return all(g.is_unimodular() for g in p.gram.values())


# ---------------------------------------------------------------------------
# duals and the canonical pairing


def _dual_restriction_matrix(r: Matrix) -> Matrix:
    if r.nrows == 0 or r.ncols == 0:
        return Matrix.zeros(r.ring, r.nrows, r.ncols)
    if r.is_square():
        return r.T.inverse()
    # surjective restriction (an open meeting several components):
    # (r r^T)^-1 r, which is r itself for a coordinate projection
    return (r @ r.T).inverse() @ r


def dual_module(e: SheafModule) -> SheafModule:
    """``E*`` in dual bases: same ranks, restrictions the transposed inverses of E's."""
    res = {k: _dual_restriction_matrix(m) for k, m in e.restrictions.items()}
    return SheafModule(e.space, e.ring, e.ranks, res)


def canonical_pairing(e: SheafModule) -> Pairing:
    """Evaluation pairing of ``E`` with ``E*``; identity Gram on every open."""
    dual = dual_module(e)
    grams = {u: Matrix.identity(e.ring, r) for u, r in enumerate(e.ranks)}
    return Pairing(e, dual, grams)


def insertion_left(p: Pairing) -> dict[int, Matrix]:
    """``s -> phi(s, .)`` as a matrix ``E(U) -> F*(U)`` acting on coordinate columns."""
    return {u: g.T for u, g in p.gram.items()}


def insertion_right(p: Pairing) -> dict[int, Matrix]:
    """``t -> phi(., t)`` as a matrix ``F(U) -> E*(U)``."""
    return dict(p.gram)


def orthogonal_via_insertion(p: Pairing, sub: SubInput, within: str = "E") -> OrthogonalResult:
    """The same orthogonal as :func:`orthogonal`, routed through an insertion map
    and the canonical pairing: ``G^perp = (phi^L G)^top`` and ``H^top = (phi^R H)^top``."""
    if within == "E":
        s = as_subsheaf(p.E, sub)
        ins, target = insertion_left(p), p.F
        side = Side.RIGHT_PERP
    elif within == "F":
        s = as_subsheaf(p.F, sub)
        ins, target = insertion_right(p), p.E
        side = Side.LEFT_TOP
    else:
        raise ValueError("within must be 'E' or 'F'")
    nu = canonical_pairing(target)
    image = {u: image_basis(ins[u] @ s[u].generators) for u in s}
    res = orthogonal(nu, image, "F")
    return OrthogonalResult(side, res.parts)


def pairing_rank(p: Pairing) -> dict[int, int]:
    """Rank of ``phi`` on each open, cross-checked against both insertions and both kernels."""
    left, right = left_kernel(p), right_kernel(p)
    ins_l, ins_r = insertion_left(p), insertion_right(p)
    out = {}
    for u, g in p.gram.items():
        r = rank(g)
        rl, rr = rank(ins_l[u]), rank(ins_r[u])
        qe = p.E.ranks[u] - left[u].rank
        qf = p.F.ranks[u] - right[u].rank
        if not r == rl == rr == qe == qf:
            raise TheoremViolation(
                f"ranks disagree over {p.space.label(u)}: phi={r}, phi^L={rl}, phi^R={rr}, "
                f"E/F^top={qe}, F/E^perp={qf}")
        out[u] = r
    return out


def _require_saturated(sub: SubSheaf) -> None:
    for part in sub.values():
        if not part.saturated and not is_saturated(part.generators):
            raise NotASummand("submodule is not a direct summand")


def dual_projections(e: SheafModule, s1: SubInput, s2: SubInput) -> tuple[dict, dict]:
    """Projections of ``E* = S1^perp (+) S2^perp`` obtained by dualizing ``E = S1 (+) S2``.

    ``p1(alpha) = alpha o pi2`` and ``p2(alpha) = alpha o pi1``, where ``pi_i`` is
    the projection of ``E`` onto ``S_i``; in dual coordinates ``p1 = pi2^T``.

    Raises:
        NotADecomposition: ``[S1 | S2]`` is not square with unit determinant on some open.
    """
    a, b = as_subsheaf(e, s1), as_subsheaf(e, s2)
    nu = canonical_pairing(e)
    perp1, perp2 = orthogonal(nu, a, "E"), orthogonal(nu, b, "E")
    ring = e.ring
    p1, p2 = {}, {}
    for u, n in enumerate(e.ranks):
        block = a[u].generators.hstack(b[u].generators)
        if not block.is_square() or not block.is_unimodular():
            raise NotADecomposition(f"S1 and S2 are not complementary over {e.space.label(u)}")
        k = a[u].rank
        select = Matrix.diagonal(ring, [1] * k + [0] * (n - k))
        pi1 = block @ select @ block.inverse()
        pi2 = Matrix.identity(ring, n) - pi1
        q1, q2 = pi2.T, pi1.T
        ident = Matrix.identity(ring, n)
        if (q1 @ q1 != q1 or q2 @ q2 != q2 or q1 + q2 != ident or not (q1 @ q2).is_zero()
                or not same_span(image_basis(q1), perp1[u]) or not same_span(image_basis(q2), perp2[u])):
            raise TheoremViolation(f"dual projections fail over {e.space.label(u)}")
        p1[u], p2[u] = q1, q2
    return p1, p2


def biorthogonal_closure(e: SheafModule, sub: SubInput) -> dict[int, SubmoduleBasis]:
    """``(S^perp)^top`` in the canonical pairing; checked equal to ``S`` on every open."""
    s = as_subsheaf(e, sub)
    _require_saturated(s)
    nu = canonical_pairing(e)
    perp = orthogonal(nu, s, "E")
    back = orthogonal(nu, perp.parts, "F")
    for u in s:
        if not same_span(back[u], s[u]):
            raise TheoremViolation(f"(S^perp)^top differs from S over {e.space.label(u)}")
    return dict(back.parts)


@dataclass(frozen=True)
class CodimReport:
    dim: int
    codim: int
    dim_perp: int
    codim_perp: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.dim, self.codim, self.dim_perp, self.codim_perp


def codim_report(e: SheafModule, sub: SubInput, dual: bool = False) -> dict[int, CodimReport]:
    """Dimensions and codimensions of ``S`` and its orthogonal in the canonical pairing.

    With ``dual=False`` ``S <= E`` and the orthogonal is ``S^perp <= E*``; with
    ``dual=True`` ``S <= E*`` and the orthogonal is ``S^top <= E``, and
    ``(S^top)^perp = S`` is also checked. Always checks
    ``dim S = codim S_orth`` and ``codim S = dim S_orth``.
    """
    nu = canonical_pairing(e)
    if dual:
        s = as_subsheaf(nu.F, sub)
        orth = orthogonal(nu, s, "F")
        back = orthogonal(nu, orth.parts, "E")
    else:
        s = as_subsheaf(e, sub)
        orth = orthogonal(nu, s, "E")
        back = None
    _require_saturated(s)
    out = {}
    for u, n in enumerate(e.ranks):
        rep = CodimReport(s[u].rank, n - s[u].rank, orth[u].rank, n - orth[u].rank)
        if rep.dim != rep.codim_perp or rep.codim != rep.dim_perp:
            raise TheoremViolation(f"codimension identities fail over {e.space.label(u)}: {rep}")
        if back is not None and not same_span(back[u], s[u]):
            raise TheoremViolation(f"(F^top)^perp differs from F over {e.space.label(u)}")
        out[u] = rep
    return out


def dual_restriction(e: SheafModule, sub: SubInput) -> tuple[dict[int, Matrix], OrthogonalResult]:
    """Restriction of functionals ``E* -> S*``; checked onto with kernel ``S^perp``."""
    s = as_subsheaf(e, sub)
    _require_saturated(s)
    nu = canonical_pairing(e)
    perp = orthogonal(nu, s, "E")
    maps = {}
    for u, part in s.items():
        m = part.generators.T
        facs = invariant_factors(m)
        if len(facs) != m.nrows or not all(e.ring.is_unit(d) for d in facs):
            raise TheoremViolation(f"restriction to S* is not onto over {e.space.label(u)}")
        if not same_span(kernel_basis(m), perp[u]):
            raise TheoremViolation(f"kernel of the restriction is not S^perp over {e.space.label(u)}")
        if part.rank != e.ranks[u] - perp[u].rank:
            raise TheoremViolation(f"dim S* != dim E* - dim S^perp over {e.space.label(u)}")
        maps[u] = m
    return maps, perp


def quotient_embedding_dual(e: SheafModule, sub: SubInput) -> dict[int, Matrix]:
    """``(E/S)* -> S^perp``, ``psi -> psi o proj``; checked injective with image ``S^perp``."""
    s = as_subsheaf(e, sub)
    _require_saturated(s)
    nu = canonical_pairing(e)
    perp = orthogonal(nu, s, "E")
    out = {}
    for u, part in s.items():
        proj, _ = quotient_presentation(e.ranks[u], part)
        lam = proj.T
        if rank(lam) != lam.ncols:
            raise TheoremViolation(f"(E/S)* -> E* is not injective over {e.space.label(u)}")
        if not same_span(image_basis(lam), perp[u]):
            raise TheoremViolation(f"image of (E/S)* is not S^perp over {e.space.label(u)}")
        out[u] = lam
    return out


def _quotient_module(m: SheafModule, kern: OrthogonalResult) -> tuple[SheafModule, dict, dict]:
    projs, lifts = {}, {}
    for u, part in kern.parts.items():
        projs[u], lifts[u] = quotient_presentation(m.ranks[u], part)
    ranks = [projs[u].nrows for u in range(len(m.ranks))]
    res = {(u, v): projs[v] @ r @ lifts[u] for (u, v), r in m.restrictions.items()}
    return SheafModule(m.space, m.ring, tuple(ranks), res), projs, lifts


def quotient_pairing(p: Pairing) -> Pairing:
    """The induced pairing of ``E/F^top`` with ``F/E^perp``; checked nondegenerate.

    Raises:
        NotASummand: a kernel is not a direct summand (cannot happen for kernels
            of integer matrices, kept for the contract).
    """
    left, right = left_kernel(p), right_kernel(p)
    qe, _, lift_e = _quotient_module(p.E, left)
    qf, _, lift_f = _quotient_module(p.F, right)
    grams = {u: lift_e[u].T @ g @ lift_f[u] for u, g in p.gram.items()}
    if p.is_self and left.ranks() == right.ranks() and all(
            same_span(left[u], right[u]) for u in left.parts):
        qf = qe
    q = Pairing(qe, qf, grams, p.flags if qf is qe else frozenset())
    if not is_nondegenerate(q):
        raise TheoremViolation("quotient pairing is degenerate")
    if qe.ranks != qf.ranks:
        raise TheoremViolation("E/F^top and F/E^perp have different ranks")
    return q


def orthogonal_sum(parts: list[Pairing]) -> Pairing:
    """Block-diagonal orthogonal sum of self-pairings on one space.

    Raises:
        FlagMismatch: the parts carry different flags, live on different
            spaces, or are not self-pairings.
    """
    if not parts:
        raise ValueError("orthogonal_sum needs at least one pairing")
    first = parts[0]
    for q in parts:
        if q.flags != first.flags or q.space != first.space or q.ring is not first.ring:
            raise FlagMismatch("parts must share space, ring and flags")
        if not q.is_self:
            raise FlagMismatch("orthogonal sums are formed from self-pairings")
    if len(parts) == 1:
        return first
    ring, space = first.ring, first.space
    ranks = tuple(sum(q.E.ranks[u] for q in parts) for u in range(len(space.opens)))
    res = {}
    for key in first.E.restrictions:
        res[key] = Matrix.block_diag(ring, [q.E.restrict(*key) for q in parts])
    e = SheafModule(space, ring, ranks, res)
    grams = {u: Matrix.block_diag(ring, [q.gram[u] for q in parts]) for u in range(len(space.opens))}
    return Pairing(e, e, grams, first.flags)
