"""Presheaves of free modules on a finite space, and the sheaf condition.

A :class:`SheafModule` assigns a free module ``R^rank(U)`` to every open ``U``
and a restriction matrix of shape ``rank(V) x rank(U)`` to every inclusion
``V <= U``. Sections over ``U`` are plain coordinate vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import AlgebraError, BadCover, ShapeError
from .linalg import contains_all, fast_rank, image_basis, kernel_basis
from .matrix import Matrix
from .report import Report
from .rings import Ring
from .topology import FiniteSpace, connected_components


@dataclass(frozen=True)
class SheafModule:
    space: FiniteSpace
    ring: Ring
    ranks: tuple[int, ...]
    restrictions: Mapping[tuple[int, int], Matrix] = field(hash=False, compare=False)

    @classmethod
    def build(cls, space: FiniteSpace, ring: Ring, ranks: Sequence[int] | Mapping[int, int],
              restrictions: Mapping[tuple[int, int], Matrix] | None = None) -> "SheafModule":
        """Fill in the restrictions that are forced or conventional.

        ``restrict(U, U)`` defaults to the identity, maps into or out of a
        rank-0 module to the zero matrix, and a missing map between modules of
        equal rank to the identity. Anything else left unspecified is reported
        by :func:`validate_presheaf`.
        """
        if isinstance(ranks, Mapping):
            ranks = [int(ranks.get(i, 0)) for i in range(len(space.opens))]
        ranks = tuple(int(r) for r in ranks)
        if len(ranks) != len(space.opens):
            raise ShapeError(f"{len(ranks)} ranks for {len(space.opens)} open sets")
        res = dict(restrictions or {})
        for u, v in space.inclusions():
            if (u, v) in res:
                continue
            if u == v or ranks[u] == ranks[v]:
                res[(u, v)] = Matrix.identity(ring, ranks[u])
            elif ranks[u] == 0 or ranks[v] == 0:
                res[(u, v)] = Matrix.zeros(ring, ranks[v], ranks[u])
        return cls(space, ring, ranks, res)

    @classmethod
    def free(cls, space: FiniteSpace, ring: Ring, rank_: int) -> "SheafModule":
        """``R^rank_`` on every nonempty open with identity restrictions.

        This is the free module of constant rank that pairings act on. It is
        a sheaf exactly when every nonempty open is connected; use
        :meth:`constant` for the sheaf of locally constant sections.
        """
        ranks = [rank_ if m else 0 for m in space.opens]
        return cls.build(space, ring, ranks)

    @classmethod
    def constant(cls, space: FiniteSpace, ring: Ring, rank_: int) -> "SheafModule":
        """The constant sheaf: locally constant ``R^rank_``-valued sections.

        Over ``U`` a section is one vector per connected component of ``U``,
        so ``rank(U) = rank_ * #components(U)``; restriction copies the
        vector of each component of ``U`` onto the components of ``V`` it contains.
        """
        comps = [open_components(space, u) for u in range(len(space.opens))]
        ranks = [rank_ * len(c) for c in comps]
        res = {}
        for u, v in space.inclusions():
            rows = []
            for d in comps[v]:
                home = next(i for i, c in enumerate(comps[u]) if d & c == d)
                for k in range(rank_):
                    row = [0] * ranks[u]
                    row[home * rank_ + k] = 1
                    rows.append(row)
            res[(u, v)] = Matrix(ring, rows, ranks[v], ranks[u])
        return cls(space, ring, tuple(ranks), res)

    def rank_of(self, u: int) -> int:
        return self.ranks[u]

    def restrict(self, u: int, v: int) -> Matrix:
        try:
            return self.restrictions[(u, v)]
        except KeyError:
            if not self.space.subset(v, u):
                raise AlgebraError(
                    f"{self.space.label(v)} is not contained in {self.space.label(u)}", "NOT_A_SUBSET") from None
            raise AlgebraError(
                f"no restriction given for {self.space.label(u)} > {self.space.label(v)}",
                "MISSING_RESTRICTION") from None

    @property
    def top_rank(self) -> int:
        return self.ranks[self.space.top]

    def to_json(self) -> dict:
        return {
            "ranks": {str(i): r for i, r in enumerate(self.ranks)},
            "restrictions": {f"{u}>{v}": m.to_json()
                             for (u, v), m in sorted(self.restrictions.items()) if u != v},
        }


def validate_presheaf(m: SheafModule) -> Report:
    """Exact check of shapes, identities and ``res(V,W) res(U,V) = res(U,W)``."""
    rep = Report()
    space = m.space
    if m.ranks[space.empty] != 0:
        rep.add("NONZERO_EMPTY", "the empty open set must carry the zero module", space.empty)
    for u, v in space.inclusions():
        r = m.restrictions.get((u, v))
        if r is None:
            rep.add("MISSING_RESTRICTION", f"no restriction {space.label(u)} > {space.label(v)}", u, v)
            continue
        if r.shape != (m.ranks[v], m.ranks[u]):
            rep.add("SHAPE", f"restriction {space.label(u)} > {space.label(v)} has shape {r.shape}, "
                             f"expected {(m.ranks[v], m.ranks[u])}", u, v)
        elif u == v and r != Matrix.identity(m.ring, m.ranks[u]):
            rep.add("IDENTITY", f"restriction {space.label(u)} > {space.label(u)} is not the identity", u)
    if not rep.ok:
        return rep
    n = len(space.opens)
    for u in range(n):
        for v in space.opens_within(u):
            if v == u:
                continue
            for w in space.opens_within(v):
                if w == v:
                    continue
                if m.restrict(v, w) @ m.restrict(u, v) != m.restrict(u, w):
                    rep.add("COMPOSITION",
                            f"res({space.label(v)},{space.label(w)}) res({space.label(u)},{space.label(v)}) "
                            f"!= res({space.label(u)},{space.label(w)})", u, v, w)
    return rep


def _cover_indices(space: FiniteSpace, u: int, cover: Iterable) -> list[int]:
    idx = []
    for c in cover:
        if isinstance(c, (frozenset, set, list, tuple)):
            from .topology import mask_of
            mask = mask_of(c)
            if not space.is_open(mask):
                raise BadCover(f"{sorted(c)} is not an open set")
            c = space.index(mask)
        if not 0 <= c < len(space.opens):
            raise BadCover(f"open index {c} out of range")
        if not space.subset(c, u):
            raise BadCover(f"cover member {space.label(c)} is not inside {space.label(u)}")
        idx.append(c)
    union = 0
    for c in idx:
        union |= space.opens[c]
    if union != space.opens[u]:
        raise BadCover(f"cover does not exhaust {space.label(u)}")
    return idx


def check_sheaf_axioms(m: SheafModule, u: int, cover: Iterable, *, presheaf_ok: bool = False) -> Report:
    """Locality and gluing for one cover of the open ``u``.

    Locality: the stacked restriction ``R = [res(U, C_i)]`` is injective.
    Gluing: every compatible family (the kernel of the pairwise-overlap
    matrix) lies in the image of ``R``.

    ``presheaf_ok=True`` asserts that :func:`validate_presheaf` passed, which
    lets the rational gluing test compare dimensions only.

    Raises:
        BadCover: a member is not an open set inside ``u`` or the union is not ``u``.
    """
    space = m.space
    members = sorted(set(_cover_indices(space, u, cover)))
    rep = Report()
    ring = m.ring
    sizes = [m.ranks[c] for c in members]
    total = sum(sizes)
    offsets = [sum(sizes[:i]) for i in range(len(sizes))]

    if total:
        stacked = Matrix.zeros(ring, 0, m.ranks[u]).vstack(*[m.restrict(u, c) for c in members])
    else:
        stacked = Matrix.zeros(ring, 0, m.ranks[u])
    stacked_rank = fast_rank(stacked)
    if stacked_rank != m.ranks[u]:
        rep.add("LOCALITY", f"a nonzero section over {space.label(u)} vanishes on every member of the cover",
                u, *members)

    rows = []
    for a, b in combinations(range(len(members)), 2):
        ca, cb = members[a], members[b]
        meet = space.index(space.opens[ca] & space.opens[cb])
        ra, rb = m.restrict(ca, meet), m.restrict(cb, meet)
        for i in range(m.ranks[meet]):
            row = [ring.zero] * total
            row[offsets[a]:offsets[a] + sizes[a]] = ra.row(i)
            row[offsets[b]:offsets[b] + sizes[b]] = [-x for x in rb.row(i)]
            rows.append(row)
    compat = Matrix.from_lists(ring, rows, total)
    if ring.is_field:
        # image(R) lies in ker(compat) by functoriality, so equal dimensions suffice
        glues = ((presheaf_ok or (compat @ stacked).is_zero())
                 and total - fast_rank(compat) == stacked_rank)
    else:
        glues = contains_all(stacked, kernel_basis(compat))
    if not glues:
        rep.add("GLUING", f"a compatible family over the cover of {space.label(u)} does not glue",
                u, *members)
    return rep


def open_components(space: FiniteSpace, u: int) -> list[int]:
    """Connected components of the open ``u`` as a subspace, as bitmasks."""
    target = space.opens[u]
    inner = [space.opens[v] for v in space.opens_within(u)]
    inner_set = set(inner)
    clopen = [w for w in inner if (target & ~w) in inner_set]
    comps = []
    left = target
    while left:
        p = (left & -left).bit_length() - 1
        c = target
        for w in clopen:
            if w >> p & 1:
                c &= w
        comps.append(c)
        left &= ~c
    return comps


def covers_of(space: FiniteSpace, u: int) -> Iterable[list[int]]:
    """Every cover of ``u`` by open proper subsets (the empty set omitted).

    Covers that contain ``u`` itself, or the empty set, satisfy both axioms
    whenever the presheaf laws hold, so they are not enumerated.
    """
    target = space.opens[u]
    inner = [v for v in space.opens_within(u) if v != u and space.opens[v]]
    for k in range(1, len(inner) + 1):
        for combo in combinations(inner, k):
            union = 0
            for c in combo:
                union |= space.opens[c]
            if union == target:
                yield list(combo)


def check_all_covers(m: SheafModule) -> Report:
    """Sheaf axioms for every cover of every open (presheaf laws checked first)."""
    rep = validate_presheaf(m)
    if not rep.ok:
        return rep
    for u in range(len(m.space.opens)):
        for cover in covers_of(m.space, u):
            rep.extend(check_sheaf_axioms(m, u, cover, presheaf_ok=True))
    return rep


def is_vector_sheaf(m: SheafModule) -> bool:
    """Locally free of locally constant rank.

    The rank must be constant on the nonempty opens lying inside one
    connected component, and restrictions between such opens must be
    invertible. Opens meeting several components are unconstrained, which
    is what lets the rank vary from one component to another.
    """
    space = m.space
    comps = [sum(1 << p for p in c) for c in connected_components(space)]

    def home(u):
        mask = space.opens[u]
        inside = [c for c in comps if mask & c == mask]
        return inside[0] if inside else None

    seen: dict[int, int] = {}
    for u in space.nonempty():
        c = home(u)
        if c is not None and seen.setdefault(c, m.ranks[u]) != m.ranks[u]:
            return False
    for u, v in space.inclusions():
        if u == v or not space.opens[v]:
            continue
        c = home(u)
        if c is None or c != home(v):
            continue
        r = m.restrictions.get((u, v))
        if r is None or not r.is_square() or not r.is_unimodular():
            return False
    return True


def restrict_vector(m: SheafModule, u: int, v: int, vec: Sequence) -> tuple:
    r = m.restrict(u, v)
    return (r @ Matrix.column_vector(m.ring, vec)).column(0) if r.nrows else ()


def restrict_matrix(m: SheafModule, u: int, v: int, cols: Matrix) -> Matrix:
    return m.restrict(u, v) @ cols


def transported(m: SheafModule, gens: Matrix, u: int | None = None) -> dict[int, Matrix]:
    """Restrict generator columns given over ``u`` (default: the whole space) to every smaller open."""
    space = m.space
    u = space.top if u is None else u
    return {v: image_basis(m.restrict(u, v) @ gens).generators for v in space.opens_within(u)}
