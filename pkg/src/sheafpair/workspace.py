"""JSON workspaces: a ring, a finite space and named sheaves, pairings,
submodules and matrices.

Matrices are arrays of row arrays whose entries are integers or strings such
as ``"-3/4"``. A sheaf is ``{"constant": n}``, ``{"free": n}`` or
``{"ranks": {open: n}, "restrictions": {"U>V": matrix}}``. A pairing's gram is
either one matrix (used on every nonempty open) or ``{open: matrix}``.
A submodule is ``{"sheaf": name, "generators": matrix}`` for global sections
or ``{"sheaf": name, "parts": {open: matrix}}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .linalg import SubmoduleBasis, image_basis
from .matrix import Matrix
from .pairing import Pairing
from .report import Report
from .rings import Ring, ring_from_name
from .sheaf import SheafModule, check_all_covers
from .topology import FiniteSpace, catalog, validate_topology


class WorkspaceError(ValueError):
    """Malformed workspace; ``location`` is a JSON path like ``$.pairings.P.gram``."""

    def __init__(self, message: str, location: str = "$"):
        self.location = location
        super().__init__(f"{location}: {message}")


@dataclass
class Workspace:
    ring: Ring
    space: FiniteSpace
    sheaves: dict[str, SheafModule] = field(default_factory=dict)
    pairings: dict[str, Pairing] = field(default_factory=dict)
    submodules: dict[str, tuple[str, dict]] = field(default_factory=dict)
    matrices: dict[str, Matrix] = field(default_factory=dict)
    seed: int | None = None
    reproduce: dict | None = None
    raw: dict = field(default_factory=dict, repr=False)

    def sheaf(self, name: str) -> SheafModule:
        try:
            return self.sheaves[name]
        except KeyError:
            raise WorkspaceError(f"no sheaf named {name!r}", "$.sheaves") from None

    def pairing(self, name: str) -> Pairing:
        try:
            return self.pairings[name]
        except KeyError:
            raise WorkspaceError(f"no pairing named {name!r}", "$.pairings") from None

    def matrix(self, name: str) -> Matrix:
        try:
            return self.matrices[name]
        except KeyError:
            raise WorkspaceError(f"no matrix named {name!r}", "$.matrices") from None

    def submodule(self, name: str):
        """A submodule argument: a named submodule, or a named matrix of global generators."""
        if name in self.submodules:
            return self.submodules[name][1]
        if name in self.matrices:
            return self.matrices[name]
        raise WorkspaceError(f"no submodule or matrix named {name!r}", "$.submodules")


def _matrix(ring: Ring, data, where: str, ncols: int | None = None) -> Matrix:
    try:
        return Matrix.from_json(ring, data, ncols)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise WorkspaceError(str(exc), where) from None
    except Exception as exc:  # ShapeError from ragged rows
        raise WorkspaceError(str(exc), where) from None


def _space(data, where: str) -> FiniteSpace:
    if isinstance(data, str):
        cat = catalog()
        if data not in cat:
            raise WorkspaceError(f"unknown catalog space {data!r}", where)
        return cat[data]
    if not isinstance(data, dict):
        raise WorkspaceError("space must be an object or a catalog name", where)
    if "catalog" in data:
        return _space(data["catalog"], where + ".catalog")
    try:
        points = int(data["points"])
        opens = data["opens"]
        return FiniteSpace.from_sets(points, [list(map(int, o)) for o in opens])
    except (KeyError, TypeError, ValueError) as exc:
        raise WorkspaceError(f"bad space: {exc}", where) from None


def _open_key(space: FiniteSpace, key: str, where: str) -> int:
    try:
        u = int(key)
    except ValueError:
        raise WorkspaceError(f"open index {key!r} is not an integer", where) from None
    if not 0 <= u < len(space.opens):
        raise WorkspaceError(f"open index {u} out of range", where)
    return u


def _sheaf(ring: Ring, space: FiniteSpace, data, where: str) -> SheafModule:
    if not isinstance(data, dict):
        raise WorkspaceError("sheaf must be an object", where)
    if "constant" in data:
        return SheafModule.constant(space, ring, int(data["constant"]))
    if "free" in data:
        return SheafModule.free(space, ring, int(data["free"]))
    if "ranks" not in data:
        raise WorkspaceError("sheaf needs 'constant', 'free' or 'ranks'", where)
    ranks_in = data["ranks"]
    if isinstance(ranks_in, list):
        ranks = {i: int(r) for i, r in enumerate(ranks_in)}
    else:
        ranks = {_open_key(space, k, where + ".ranks"): int(v) for k, v in ranks_in.items()}
    res = {}
    for key, m in (data.get("restrictions") or {}).items():
        loc = f"{where}.restrictions.{key}"
        try:
            a, b = key.split(">")
        except ValueError:
            raise WorkspaceError("restriction keys look like 'U>V'", loc) from None
        u, v = _open_key(space, a, loc), _open_key(space, b, loc)
        res[(u, v)] = _matrix(ring, m, loc, ranks.get(u, 0))
    return SheafModule.build(space, ring, ranks, res)


def _pairing(ring: Ring, space: FiniteSpace, sheaves: dict, data, where: str) -> Pairing:
    if not isinstance(data, dict):
        raise WorkspaceError("pairing must be an object", where)
    try:
        e = sheaves[data["E"]]
        f = sheaves[data.get("F", data["E"])]
    except KeyError as exc:
        raise WorkspaceError(f"unknown sheaf {exc}", where) from None
    flags = frozenset(data.get("flags", []))
    gram = data.get("gram")
    if isinstance(gram, list):
        return Pairing.constant(e, f, _matrix(ring, gram, where + ".gram", f.top_rank), flags)
    if not isinstance(gram, dict):
        raise WorkspaceError("gram must be a matrix or an object keyed by open index", where + ".gram")
    grams = {}
    for k, m in gram.items():
        u = _open_key(space, k, where + ".gram")
        grams[u] = _matrix(ring, m, f"{where}.gram.{k}", f.ranks[u])
    for u in range(len(space.opens)):
        if u not in grams and not space.opens[u]:
            grams[u] = Matrix.zeros(ring, e.ranks[u], f.ranks[u])
    return Pairing(e, f, grams, flags)


def _submodule(ring: Ring, space: FiniteSpace, sheaves: dict, data, where: str):
    if not isinstance(data, dict) or "sheaf" not in data:
        raise WorkspaceError("submodule needs a 'sheaf'", where)
    name = data["sheaf"]
    if name not in sheaves:
        raise WorkspaceError(f"unknown sheaf {name!r}", where)
    m = sheaves[name]
    if "generators" in data:
        return name, _matrix(ring, data["generators"], where + ".generators")
    if "parts" in data:
        parts = {}
        for k, gens in data["parts"].items():
            u = _open_key(space, k, where + ".parts")
            mat = _matrix(ring, gens, f"{where}.parts.{k}")
            if mat.nrows != m.ranks[u]:
                raise WorkspaceError(f"part has {mat.nrows} rows, sheaf rank is {m.ranks[u]}",
                                     f"{where}.parts.{k}")
            parts[u] = image_basis(mat)
        for u in range(len(space.opens)):
            if u not in parts and m.ranks[u] == 0:
                parts[u] = SubmoduleBasis(0, Matrix.zeros(ring, 0, 0), True)
        return name, parts
    raise WorkspaceError("submodule needs 'generators' or 'parts'", where)


def load_workspace(data: Any, ring_override: str | None = None) -> Workspace:
    """Build a workspace from parsed JSON.

    Raises:
        WorkspaceError: the document is malformed; the message names the location.
    """
    if not isinstance(data, dict):
        raise WorkspaceError("workspace must be a JSON object")
    try:
        ring = ring_from_name(ring_override or data.get("ring", "QQ"))
    except Exception as exc:
        raise WorkspaceError(str(exc), "$.ring") from None
    space = _space(data.get("space", "point"), "$.space")
    ws = Workspace(ring, space, seed=data.get("seed"), reproduce=data.get("reproduce"), raw=data)
    for name, sd in (data.get("sheaves") or {}).items():
        ws.sheaves[name] = _sheaf(ring, space, sd, f"$.sheaves.{name}")
    for name, pd in (data.get("pairings") or {}).items():
        ws.pairings[name] = _pairing(ring, space, ws.sheaves, pd, f"$.pairings.{name}")
    for name, sd in (data.get("submodules") or {}).items():
        ws.submodules[name] = _submodule(ring, space, ws.sheaves, sd, f"$.submodules.{name}")
    for name, md in (data.get("matrices") or {}).items():
        ws.matrices[name] = _matrix(ring, md, f"$.matrices.{name}")
    seen: set[str] = set()
    for group in (ws.sheaves, ws.pairings, ws.submodules, ws.matrices):
        dup = seen & set(group)
        if dup:
            raise WorkspaceError(f"name {sorted(dup)[0]!r} used twice")
        seen |= set(group)
    return ws


def read_workspace(path: str, ring_override: str | None = None) -> Workspace:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
    except OSError as exc:
        raise WorkspaceError(str(exc), path) from None
    return load_workspace(data, ring_override)


def validate_workspace(ws: Workspace) -> dict[str, Report]:
    """Topology, presheaf laws plus every cover for each sheaf, and each pairing."""
    from .pairing import validate_pairing

    out = {"space": validate_topology(ws.space)}
    if not out["space"].ok:
        return out
    for name, m in ws.sheaves.items():
        out[f"sheaf:{name}"] = check_all_covers(m)
    for name, p in ws.pairings.items():
        out[f"pairing:{name}"] = validate_pairing(p)
    return out


def matrix_json(m: Matrix) -> list:
    return m.to_json()


def sheaf_json(m: SheafModule) -> dict:
    return {"ranks": [r for r in m.ranks],
            "restrictions": {f"{u}>{v}": r.to_json()
                             for (u, v), r in sorted(m.restrictions.items()) if u != v}}


def dump_workspace(ring: Ring, space: FiniteSpace, *, sheaves=None, pairings=None,
                   submodules=None, matrices=None, seed=None, reproduce=None) -> dict:
    """Serialize objects back to the workspace format (used for reproducer files).

    ``pairings`` maps names to ``(pairing, E name, F name)``; ``submodules`` maps
    names to ``(sheaf name, generator matrix)``.
    """
    doc: dict = {"ring": ring.tag, "space": space.to_json()}
    if sheaves:
        doc["sheaves"] = {k: sheaf_json(v) for k, v in sheaves.items()}
    if pairings:
        doc["pairings"] = {k: {"E": e, "F": f, "flags": sorted(p.flags),
                               "gram": {str(u): g.to_json() for u, g in sorted(p.gram.items())}}
                           for k, (p, e, f) in pairings.items()}
    if submodules:
        doc["submodules"] = {k: {"sheaf": s, "generators": g.to_json()} for k, (s, g) in submodules.items()}
    if matrices:
        doc["matrices"] = {k: v.to_json() for k, v in matrices.items()}
    if seed is not None:
        doc["seed"] = seed
    if reproduce is not None:
        doc["reproduce"] = reproduce
    return doc
