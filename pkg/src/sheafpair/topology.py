"""Finite topological spaces given extensionally by their open sets."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .report import Report


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def points_of(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _fmt(mask: int) -> str:
    return "{" + ",".join(map(str, points_of(mask))) + "}"


@dataclass(frozen=True)
class FiniteSpace:
    """Points ``0..points-1`` and a list of open sets stored as bitmasks.

    Open sets are addressed by their position in ``opens``; that index is what
    sheaves, pairings and the JSON formats use as a key.
    """

    points: int
    opens: tuple[int, ...]

    @classmethod
    def from_sets(cls, points: int, opens: Iterable[Iterable[int]]) -> "FiniteSpace":
        return cls(points, tuple(mask_of(o) for o in opens))

    @property
    def full(self) -> int:
        return (1 << self.points) - 1

    @cached_property
    def _index(self) -> dict[int, int]:
        return {m: i for i, m in enumerate(self.opens)}

    def index(self, mask: int) -> int:
        try:
            return self._index[mask]
        except KeyError:
            raise KeyError(f"{_fmt(mask)} is not an open set") from None

    def is_open(self, mask: int) -> bool:
        return mask in self._index

    @property
    def top(self) -> int:
        """Index of the whole space."""
        return self.index(self.full)

    @property
    def empty(self) -> int:
        return self.index(0)

    def subset(self, v: int, u: int) -> bool:
        """True iff open ``v`` is contained in open ``u`` (both given by index)."""
        a, b = self.opens[v], self.opens[u]
        return a & b == a

    def opens_within(self, u: int) -> list[int]:
        return [v for v in range(len(self.opens)) if self.subset(v, u)]

    def inclusions(self) -> list[tuple[int, int]]:
        """All pairs ``(U, V)`` of open indices with ``V`` contained in ``U``."""
        n = len(self.opens)
        return [(u, v) for u in range(n) for v in range(n) if self.subset(v, u)]

    def nonempty(self) -> list[int]:
        return [i for i, m in enumerate(self.opens) if m]

    def label(self, u: int) -> str:
        return _fmt(self.opens[u])

    def to_json(self) -> dict:
        return {"points": self.points, "opens": [points_of(m) for m in self.opens]}


def validate_topology(space: FiniteSpace) -> Report:
    """Check that the open sets form a topology; reports the first gap found."""
    rep = Report()
    full = space.full
    seen = set()
    for i, m in enumerate(space.opens):
        if m & ~full:
            rep.add("OUT_OF_RANGE", f"open #{i} {_fmt(m)} uses points outside 0..{space.points - 1}", i)
        if m in seen:
            rep.add("DUPLICATE", f"open #{i} {_fmt(m)} listed twice", i)
        seen.add(m)
    if not rep.ok:
        return rep
    opens = set(space.opens)
    if 0 not in opens:
        rep.add("MISSING_EMPTY", "the empty set is not open")
    for a, b in combinations(space.opens, 2):
        if a | b not in opens:
            rep.add("MISSING_UNION", f"missing {_fmt(a | b)} = {_fmt(a)} U {_fmt(b)}", a | b)
            break
        if a & b not in opens:
            rep.add("MISSING_INTERSECTION", f"missing {_fmt(a & b)} = {_fmt(a)} n {_fmt(b)}", a & b)
            break
    if full not in opens and "MISSING_UNION" not in rep.kinds():
        rep.add("MISSING_FULL", f"the whole space {_fmt(full)} is not open", full)
    return rep


def connected_components(space: FiniteSpace) -> list[frozenset[int]]:
    """Partition of the points into connected components.

    In a finite space the components are the minimal nonempty clopen sets, so
    each point's component is the intersection of the clopens containing it.
    """
    opens = set(space.opens)
    clopens = [m for m in space.opens if (space.full & ~m) in opens]
    comps: list[frozenset[int]] = []
    assigned = 0
    for p in range(space.points):
        if assigned >> p & 1:
            continue
        c = space.full
        for m in clopens:
            if m >> p & 1:
                c &= m
        assigned |= c
        comps.append(frozenset(points_of(c)))
    return comps


def is_connected(space: FiniteSpace) -> bool:
    return len(connected_components(space)) <= 1


def generate_topology(points: int, generators: Sequence[Iterable[int]]) -> FiniteSpace:
    """Smallest topology containing the given sets (closure under unions and meets)."""
    full = (1 << points) - 1
    found = {0, full} | {mask_of(g) & full for g in generators}
    changed = True
    while changed:
        changed = False
        cur = list(found)
        for a, b in combinations(cur, 2):
            for c in (a | b, a & b):
                if c not in found:
                    found.add(c)
                    changed = True
    return FiniteSpace(points, tuple(sorted(found, key=lambda m: (bin(m).count("1"), m))))


def disjoint_union(a: FiniteSpace, b: FiniteSpace) -> FiniteSpace:
    shift = a.points
    opens = sorted({x | (y << shift) for x in a.opens for y in b.opens},
                   key=lambda m: (bin(m).count("1"), m))
    return FiniteSpace(a.points + b.points, tuple(opens))


def sierpinski() -> FiniteSpace:
    return FiniteSpace.from_sets(2, [[], [1], [0, 1]])


def discrete(points: int) -> FiniteSpace:
    return generate_topology(points, [[i] for i in range(points)])


def indiscrete(points: int) -> FiniteSpace:
    return generate_topology(points, [])


def chain(points: int) -> FiniteSpace:
    """Opens ``{}, {n-1}, {n-2,n-1}, ..., all``: a connected Alexandrov chain."""
    return generate_topology(points, [list(range(k, points)) for k in range(points)])


def catalog() -> dict[str, FiniteSpace]:
    """A fixed catalog of small topologies (at most four points)."""
    return {
        "point": indiscrete(1),
        "indiscrete-2": indiscrete(2),
        "sierpinski": sierpinski(),
        "discrete-2": discrete(2),
        "indiscrete-3": indiscrete(3),
        "chain-3": chain(3),
        "discrete-3": discrete(3),
        "v-shape-3": generate_topology(3, [[0], [1]]),
        "wedge-3": generate_topology(3, [[0, 1], [1, 2]]),
        "sierpinski+point": disjoint_union(sierpinski(), indiscrete(1)),
        "chain-4": chain(4),
        "two-sierpinski": disjoint_union(sierpinski(), sierpinski()),
        "pseudocircle-4": generate_topology(4, [[0], [1], [0, 1, 2], [0, 1, 3]]),
        "diamond-4": generate_topology(4, [[0], [0, 1], [0, 2]]),
        "indiscrete-4": indiscrete(4),
        "discrete-4": discrete(4),
    }
