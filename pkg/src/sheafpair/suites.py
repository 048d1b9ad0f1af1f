"""Randomized verification suites behind ``sheafpair prove``.

A case is a workspace document plus the operation (and arguments) that checks
it. Running a case means loading the document and running the operation, so a
failing case written to disk is already a reproducer for ``sheafpair compute``.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from typing import Callable

from . import instances as gen
from .errors import AlgebraError
from .matrix import Matrix
from .ops import run_op
from .rings import QQ, ZZ, Ring
from .sheaf import covers_of
from .topology import FiniteSpace, catalog, generate_topology
from .workspace import load_workspace


@dataclass
class Case:
    doc: dict
    op: str
    args: dict


@dataclass
class CaseResult:
    index: int
    ok: bool
    code: str = ""
    message: str = ""
    reproducer: str | None = None

    def to_json(self) -> dict:
        out = {"case": self.index, "ok": self.ok}
        if not self.ok:
            out.update(error=self.code, message=self.message)
            if self.reproducer:
                out["reproducer"] = self.reproducer
        return out


@dataclass
class SuiteReport:
    suite: str
    seed: int
    cases: int
    max_rank: int
    ring: str
    results: list[CaseResult] = field(default_factory=list)

    @property
    def failures(self) -> list[CaseResult]:
        return [r for r in self.results if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = {"suite": self.suite, "seed": self.seed, "cases": self.cases,
               "max_rank": self.max_rank, "ring": self.ring,
               "passed": len(self.results) - len(self.failures),
               "failed": len(self.failures), "ok": self.ok,
               "failures": [r.to_json() for r in self.failures]}
        if self.cases == 0:
            out["warning"] = "no cases were run; the pass is vacuous"
        return out


def _point_doc(ring: Ring, **parts) -> dict:
    doc = {"ring": ring.tag, "space": "point"}
    doc.update({k: v for k, v in parts.items() if v})
    return doc


def _free(n: int) -> dict:
    return {"free": n}


def _sub_doc(m: Matrix) -> dict:
    return {"sheaf": "E", "generators": m.to_json()}


def _size(rng: random.Random, max_rank: int, low: int = 1) -> int:
    return rng.randint(low, max(low, max_rank))


# --- case builders --------------------------------------------------------------

def case_biorthogonality(rng, ring, max_rank):
    n = _size(rng, max_rank)
    s = gen.saturated_submodule(rng, ring, n)
    return Case(_point_doc(ring, sheaves={"E": _free(n)}, submodules={"S": _sub_doc(s)}),
                "biorthogonal", {"sheaf": "E", "sub": "S"})


def case_codim(rng, ring, max_rank):
    n = _size(rng, max_rank)
    s = gen.saturated_submodule(rng, ring, n)
    return Case(_point_doc(ring, sheaves={"E": _free(n)}, submodules={"S": _sub_doc(s)}),
                "codim", {"sheaf": "E", "sub": "S", "dual": "both"})


def case_dimension(rng, ring, max_rank):
    m, n = _size(rng, max_rank), _size(rng, max_rank)
    mat = gen.low_rank(rng, ring, m, n, rng.randint(0, min(m, n))) if rng.random() < 0.5 \
        else gen.matrix(rng, ring, m, n)
    return Case(_point_doc(ring, matrices={"M": mat.to_json()}), "dimension", {"matrix": "M"})


def _pairing_doc(ring, g: Matrix, flags=()) -> dict:
    sheaves = {"E": _free(g.nrows)}
    f = "E"
    if not g.is_square():
        sheaves["F"] = _free(g.ncols)
        f = "F"
    return _point_doc(ring, sheaves=sheaves,
                      pairings={"P": {"E": "E", "F": f, "gram": g.to_json(), "flags": list(flags)}})


def case_insertion(rng, ring, max_rank):
    m, n = _size(rng, max_rank), _size(rng, max_rank)
    g = gen.low_rank(rng, ring, m, n, rng.randint(0, min(m, n))) if rng.random() < 0.5 \
        else gen.matrix(rng, ring, m, n)
    return Case(_pairing_doc(ring, g), "quotient", {"pairing": "P"})


def case_orthogonal(rng, ring, max_rank):
    m, n = _size(rng, max_rank), _size(rng, max_rank)
    if rng.random() < 0.4:
        n = m
        g = gen.invertible(rng, ring, m)
    else:
        g = gen.low_rank(rng, ring, m, n, rng.randint(0, min(m, n)))
    within = rng.choice(["E", "F"])
    s = gen.saturated_submodule(rng, ring, m if within == "E" else n)
    doc = _pairing_doc(ring, g)
    doc["submodules"] = {"G": {"sheaf": "E" if within == "E" or g.is_square() else "F",
                               "generators": s.to_json()}}
    return Case(doc, "orthogonal", {"pairing": "P", "sub": "G", "within": within, "check": "insertion"})


def case_dual_decomposition(rng, ring, max_rank):
    n = _size(rng, max_rank)
    s1, s2 = gen.complementary_pair(rng, ring, n)
    return Case(_point_doc(ring, sheaves={"E": _free(n)},
                           submodules={"S1": _sub_doc(s1), "S2": _sub_doc(s2)}),
                "dual-projections", {"sheaf": "E", "sub1": "S1", "sub2": "S2"})


def case_quotient(rng, ring, max_rank):
    g = gen.degenerate_gram(rng, ring, max_rank)
    return Case(_pairing_doc(ring, g), "quotient", {"pairing": "P"})


def case_witt(rng, ring, max_rank):
    half = _size(rng, max(1, max_rank // 2))
    g, f = gen.isotropic_instance(rng, ring, half)
    doc = _pairing_doc(ring, g, ["skew"])
    doc["submodules"] = {"F": _sub_doc(f)}
    return Case(doc, "witt", {"pairing": "P", "iso": "F"})


def case_partner(rng, ring, max_rank):
    n = 2 * _size(rng, max(1, max_rank // 2))
    g = gen.nondegenerate_skew(rng, ring, n)
    r = ",".join("1" if i == 0 else "0" for i in range(n))
    return Case(_pairing_doc(ring, g, ["skew"]), "partner", {"pairing": "P", "r": r})


def case_snf(rng, ring, max_rank):
    m, n = _size(rng, max_rank), _size(rng, max_rank)
    mat = gen.matrix(rng, ZZ, m, n, density=rng.choice([0.4, 0.7, 1.0]))
    return Case({"ring": "ZZ", "space": "point", "matrices": {"M": mat.to_json()}},
                "snf", {"matrix": "M"})


def _random_space(rng: random.Random, points: int) -> FiniteSpace:
    gens = [[p for p in range(points) if rng.random() < 0.5] for _ in range(rng.randint(0, 3))]
    return generate_topology(points, gens)


def case_sheaf(rng, ring, max_rank):
    cat = catalog()
    if rng.random() < 0.5:
        space = cat[rng.choice(sorted(cat))]
    else:
        space = _random_space(rng, rng.randint(1, 4))
    doc = {"ring": ring.tag, "space": space.to_json(), "sheaves": {"E": {"constant": rng.randint(1, 2)}}}
    if len(space.opens) > 10:
        u = rng.choice(space.nonempty())
        covers = list(covers_of(space, u))
        if covers:
            cover = rng.choice(covers)
            return Case(doc, "sheaf-axioms", {"sheaf": "E", "open": str(u),
                                               "cover": ",".join(map(str, cover))})
    return Case(doc, "sheaf-axioms", {"sheaf": "E"})


SUITES: dict[str, tuple[Callable, Ring | None]] = {
    # name: (case builder, forced ring or None for the --ring choice)
    "biorthogonality": (case_biorthogonality, None),
    "codim": (case_codim, None),
    "dimension": (case_dimension, None),
    "insertion": (case_insertion, None),
    "orthogonal": (case_orthogonal, None),
    "dual-decomposition": (case_dual_decomposition, None),
    "quotient": (case_quotient, None),
    "witt": (case_witt, None),
    "partner": (case_partner, QQ),
    "snf": (case_snf, ZZ),
    "sheaf": (case_sheaf, None),
}


def build_case(suite: str, seed: int, index: int, max_rank: int, ring: Ring | None = None) -> Case:
    """The ``index``-th case of a suite; depends only on its arguments.

    With ``ring=None`` the dimension suite alternates QQ and ZZ by index and the
    others use QQ.
    """
    builder, forced = SUITES[suite]
    if forced is not None:
        ring = forced
    elif ring is None:
        ring = ZZ if suite == "dimension" and index % 2 else QQ
    rng = random.Random(f"{suite}:{seed}:{index}")
    return builder(rng, ring, max_rank)


def run_case(case: Case) -> tuple[bool, str, str]:
    try:
        ws = load_workspace(case.doc)
        result = run_op(ws, case.op, case.args)
    except AlgebraError as exc:
        return False, exc.code, str(exc)
    if result.get("ok") is False:
        return False, "CHECK_FAILED", json.dumps(result.get("report", result), sort_keys=True)[:500]
    return True, "", ""


def run_suite(suite: str, cases: int, seed: int, max_rank: int, ring: Ring | None = None,
              out_dir: str | None = None) -> SuiteReport:
    """Run ``cases`` instances; failing ones are written as reproducer files to ``out_dir``."""
    if suite not in SUITES:
        raise KeyError(suite)
    report = SuiteReport(suite, seed, cases, max_rank, ring.tag if ring else "default")
    for i in range(cases):
        case = build_case(suite, seed, i, max_rank, ring)
        ok, code, msg = run_case(case)
        res = CaseResult(i, ok, code, msg)
        if not ok and out_dir is not None:
            res.reproducer = write_reproducer(out_dir, suite, seed, i, case)
        report.results.append(res)
    return report


def write_reproducer(out_dir: str, suite: str, seed: int, index: int, case: Case) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{suite}-seed{seed}-case{index}.json")
    doc = dict(case.doc)
    doc["seed"] = seed
    doc["reproduce"] = {"op": case.op, "args": case.args}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
