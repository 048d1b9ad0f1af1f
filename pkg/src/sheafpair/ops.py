"""Named operations on a workspace, as run by ``sheafpair compute``.

Every operation takes the workspace and its ``key=value`` arguments and
returns a JSON-ready dict. A result carrying ``"ok": false`` makes the CLI
exit with status 1; operations that verify an identity raise
:class:`~sheafpair.errors.TheoremViolation` when it fails.
"""

from __future__ import annotations

from typing import Callable

from . import linalg, pairing as pr, sheaf as sh, topology as tp, witt
from .errors import TheoremViolation
from .linalg import SubmoduleBasis
from .matrix import Matrix
from .workspace import Workspace, WorkspaceError


class UsageError(ValueError):
    """Unknown operation or missing/ill-formed argument (exit status 2)."""


def _need(args: dict, key: str) -> str:
    if key not in args:
        raise UsageError(f"missing argument {key}=...")
    return args[key]


def _vector(ws: Workspace, text: str) -> tuple:
    try:
        return tuple(ws.ring.parse(x) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad vector {text!r}: {exc}") from None


def _flag(args: dict, key: str) -> bool:
    return args.get(key, "false").lower() in ("1", "true", "yes")


def _sub_json(b: SubmoduleBasis) -> dict:
    return b.to_json()


def _orth_json(res: pr.OrthogonalResult, space) -> dict:
    out = res.to_json()
    out["ranks"] = {str(u): r for u, r in sorted(res.ranks().items())}
    out["rank"] = res[space.top].rank
    return out


def _per_open(mats: dict) -> dict:
    return {str(u): m.to_json() for u, m in sorted(mats.items())}


def _sheaf_for(ws: Workspace, args: dict, sub_key: str = "sub"):
    """The sheaf named by ``sheaf=``, else the one owning the named submodule."""
    if "sheaf" in args:
        return ws.sheaf(args["sheaf"])
    name = args.get(sub_key)
    if name in ws.submodules:
        return ws.sheaf(ws.submodules[name][0])
    raise UsageError("missing argument sheaf=...")


# --- topology and sheaves ---------------------------------------------------

def op_topology(ws, args):
    rep = tp.validate_topology(ws.space)
    comps = tp.connected_components(ws.space)
    return {"ok": rep.ok, "report": rep.to_json(), "opens": len(ws.space.opens),
            "components": [sorted(c) for c in comps]}


def op_presheaf(ws, args):
    rep = sh.validate_presheaf(ws.sheaf(_need(args, "sheaf")))
    return {"ok": rep.ok, "report": rep.to_json()}


def op_sheaf_axioms(ws, args):
    m = ws.sheaf(_need(args, "sheaf"))
    if "open" in args:
        u = int(args["open"])
        cover = [int(c) for c in _need(args, "cover").split(",")]
        rep = sh.check_sheaf_axioms(m, u, cover)
    else:
        rep = sh.check_all_covers(m)
    return {"ok": rep.ok, "report": rep.to_json()}


def op_vector_sheaf(ws, args):
    return {"vector_sheaf": sh.is_vector_sheaf(ws.sheaf(_need(args, "sheaf")))}


# --- linear algebra -----------------------------------------------------------

def op_snf(ws, args):
    """Smith form with its defining identities re-checked."""
    m = ws.matrix(_need(args, "matrix"))
    u, d, v = linalg.smith_normal_form(m)
    facs = linalg.invariant_factors(m)
    ok = (u @ m @ v == d and u.is_unimodular() and v.is_unimodular()
          and all(m.ring.divides(a, b) for a, b in zip(facs, facs[1:])))
    if _flag(args, "oracle") or (not ws.ring.is_field and max(m.shape) <= 4):
        ok = ok and linalg.invariant_factors_by_minors(m) == facs
    if not ok:
        raise TheoremViolation("Smith normal form identities fail")
    return {"U": u.to_json(), "D": d.to_json(), "V": v.to_json(),
            "invariant_factors": [ws.ring.format(x) for x in facs], "ok": True}


def op_rank(ws, args):
    return {"rank": linalg.rank(ws.matrix(_need(args, "matrix")))}


def op_kernel(ws, args):
    return _sub_json(linalg.kernel_basis(ws.matrix(_need(args, "matrix"))))


def op_image(ws, args):
    return _sub_json(linalg.image_basis(ws.matrix(_need(args, "matrix"))))


def op_saturate(ws, args):
    return _sub_json(linalg.saturate(ws.matrix(_need(args, "matrix"))))


def op_complement(ws, args):
    return _sub_json(linalg.complement(linalg.image_basis(ws.matrix(_need(args, "matrix")))))


def op_intersection(ws, args):
    a = linalg.image_basis(ws.matrix(_need(args, "a")))
    b = linalg.image_basis(ws.matrix(_need(args, "b")))
    return _sub_json(linalg.intersection(a, b))


def op_solve(ws, args):
    m = ws.matrix(_need(args, "matrix"))
    x = linalg.solve(m, _vector(ws, _need(args, "rhs")))
    return {"solution": [ws.ring.format(v) for v in x]}


def op_dimension(ws, args):
    m = ws.matrix(_need(args, "matrix"))
    r, k, ok = linalg.dimension_formula_check(m)
    if not ok:
        raise TheoremViolation(f"rank {r} + nullity {k} != {m.ncols}")
    return {"rank": r, "nullity": k, "columns": m.ncols, "ok": ok}


# --- pairings -------------------------------------------------------------------

def op_validate_pairing(ws, args):
    rep = pr.validate_pairing(ws.pairing(_need(args, "pairing")))
    return {"ok": rep.ok, "report": rep.to_json()}


def op_right_kernel(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    return _orth_json(pr.right_kernel(p), p.space)


def op_left_kernel(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    return _orth_json(pr.left_kernel(p), p.space)


def op_orthogonal(ws, args):
    """``check=insertion`` also routes through the insertion map and compares."""
    p = ws.pairing(_need(args, "pairing"))
    within = args.get("within", "E")
    sub = ws.submodule(_need(args, "sub"))
    res = pr.orthogonal(p, sub, within)
    out = _orth_json(res, p.space)
    if args.get("check") == "insertion":
        other = pr.orthogonal_via_insertion(p, sub, within)
        if not all(linalg.same_span(res[u], other[u]) for u in res.parts):
            raise TheoremViolation("orthogonal differs from the insertion route")
        top = p.space.top
        dim_sub = pr.as_subsheaf(p.E if within == "E" else p.F, sub)[top].rank
        target = p.F if within == "E" else p.E
        if res[top].rank < target.ranks[top] - dim_sub:
            raise TheoremViolation("orthogonal is smaller than rank - dim G")
        if pr.is_nondegenerate(p) and p.E.top_rank == p.F.top_rank:
            if res[top].rank != target.ranks[top] - dim_sub:
                raise TheoremViolation("dim G^perp != rank - dim G for a nondegenerate pairing")
            back = pr.orthogonal(p, res.parts, "F" if within == "E" else "E")
            given = pr.as_subsheaf(p.E if within == "E" else p.F, sub)
            if not all(linalg.same_span(back[u], given[u]) for u in given):
                raise TheoremViolation("the double orthogonal differs from G")
        out["checked"] = "insertion"
    return out


def op_radical(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    sub = ws.submodule(args["sub"]) if "sub" in args else None
    return _orth_json(pr.radical(p, sub), p.space)


def op_nondegenerate(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    return {"nondegenerate": pr.is_nondegenerate(p), "unimodular": pr.is_unimodular(p)}


def op_canonical(ws, args):
    c = pr.canonical_pairing(ws.sheaf(_need(args, "sheaf")))
    return {"gram": _per_open(c.gram),
            "dual_restrictions": {f"{u}>{v}": m.to_json()
                                  for (u, v), m in sorted(c.F.restrictions.items()) if u != v}}


def op_insertion(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    return {"left": _per_open(pr.insertion_left(p)), "right": _per_open(pr.insertion_right(p))}


def op_pairing_rank(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    return {"rank": {str(u): r for u, r in sorted(pr.pairing_rank(p).items())}}


def op_dual_projections(ws, args):
    e = _sheaf_for(ws, args, "sub1")
    p1, p2 = pr.dual_projections(e, ws.submodule(_need(args, "sub1")), ws.submodule(_need(args, "sub2")))
    return {"p1": _per_open(p1), "p2": _per_open(p2), "ok": True}


def op_biorthogonal(ws, args):
    e = _sheaf_for(ws, args)
    res = pr.biorthogonal_closure(e, ws.submodule(_need(args, "sub")))
    return {"closure": {str(u): b.to_json() for u, b in sorted(res.items())}, "ok": True}


def op_codim(ws, args):
    """``dual=true`` reads the submodule inside ``E*``; ``dual=both`` runs both sides."""
    e = _sheaf_for(ws, args)
    sub = ws.submodule(_need(args, "sub"))
    top = e.space.top
    mode = args.get("dual", "false").lower()
    sides = [False, True] if mode == "both" else [_flag(args, "dual")]
    out = {"ok": True}
    for dual in sides:
        rep = pr.codim_report(e, sub, dual=dual)
        key = "dual" if dual else "primal"
        out[key] = {str(u): list(r.as_tuple()) for u, r in sorted(rep.items())}
        out["top"] = list(rep[top].as_tuple())
    return out


def op_dual_restriction(ws, args):
    e = _sheaf_for(ws, args)
    maps, kern = pr.dual_restriction(e, ws.submodule(_need(args, "sub")))
    return {"surjection": _per_open(maps), "kernel": _orth_json(kern, e.space), "ok": True}


def op_quotient_dual(ws, args):
    e = _sheaf_for(ws, args)
    return {"embedding": _per_open(pr.quotient_embedding_dual(e, ws.submodule(_need(args, "sub")))),
            "ok": True}


def op_quotient(ws, args):
    """Quotient pairing; its ranks are checked against ``pairing_rank``."""
    p = ws.pairing(_need(args, "pairing"))
    q = pr.quotient_pairing(p)
    ranks = pr.pairing_rank(p)
    for u, r in ranks.items():
        if q.E.ranks[u] != r or q.F.ranks[u] != r:
            raise TheoremViolation(f"quotient rank over {p.space.label(u)} differs from the pairing rank")
    return {"gram": _per_open(q.gram), "ranks": {str(u): r for u, r in sorted(ranks.items())},
            "nondegenerate": True, "ok": True}


def op_orthogonal_sum(ws, args):
    parts = [ws.pairing(n) for n in _need(args, "pairings").split(",")]
    s = pr.orthogonal_sum(parts)
    return {"gram": _per_open(s.gram), "rank": s.E.top_rank}


# --- hyperbolic planes ----------------------------------------------------------

def op_partner(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    r = _vector(ws, _need(args, "r"))
    if "basis" in args:
        basis = ws.matrix(args["basis"]).columns()
    else:
        n = p.E.top_rank
        basis = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    s, c = witt.find_partner(p, r, basis)
    return {"s": [ws.ring.format(x) for x in s], "c": ws.ring.format(c), "ok": True}


def op_split(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    sub = ws.submodule(_need(args, "sub"))
    if not isinstance(sub, Matrix):
        raise UsageError("split takes a submodule of global generators")
    s, perp = witt.split_nonisotropic(p, sub)
    return {"sub": s.to_json(), "perp": perp.to_json()}


def op_witt(ws, args):
    p = ws.pairing(_need(args, "pairing"))
    iso = ws.submodule(_need(args, "iso"))
    if not isinstance(iso, Matrix):
        raise UsageError("witt takes a submodule of global generators")
    res = witt.hyperbolic_decomposition(p, iso)
    rep = witt.verify_witt(p, iso, res)
    out = res.to_json(verified=rep.ok)
    out["ok"] = rep.ok
    if not rep.ok:
        out["report"] = rep.to_json()
    return out


OPS: dict[str, Callable[[Workspace, dict], dict]] = {
    "topology": op_topology,
    "presheaf": op_presheaf,
    "sheaf-axioms": op_sheaf_axioms,
    "vector-sheaf": op_vector_sheaf,
    "snf": op_snf,
    "rank": op_rank,
    "kernel": op_kernel,
    "image": op_image,
    "saturate": op_saturate,
    "complement": op_complement,
    "intersection": op_intersection,
    "solve": op_solve,
    "dimension": op_dimension,
    "validate-pairing": op_validate_pairing,
    "right-kernel": op_right_kernel,
    "left-kernel": op_left_kernel,
    "orthogonal": op_orthogonal,
    "radical": op_radical,
    "nondegenerate": op_nondegenerate,
    "canonical": op_canonical,
    "insertion": op_insertion,
    "pairing-rank": op_pairing_rank,
    "dual-projections": op_dual_projections,
    "biorthogonal": op_biorthogonal,
    "codim": op_codim,
    "dual-restriction": op_dual_restriction,
    "quotient-dual": op_quotient_dual,
    "quotient": op_quotient,
    "orthogonal-sum": op_orthogonal_sum,
    "partner": op_partner,
    "split": op_split,
    "witt": op_witt,
}


def run_op(ws: Workspace, name: str, args: dict) -> dict:
    """Dispatch ``name``; unknown names raise :class:`UsageError`."""
    try:
        fn = OPS[name]
    except KeyError:
        raise UsageError(f"unknown operation {name!r}; known: {', '.join(sorted(OPS))}") from None
    try:
        return fn(ws, args)
    except WorkspaceError:
        raise
    except (KeyError, IndexError) as exc:
        raise UsageError(f"bad argument: {exc}") from None
