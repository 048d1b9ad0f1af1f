import pytest

from sheafpair.rings import QQ, ZZ
from sheafpair.suites import SUITES, build_case, run_case, run_suite


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_every_suite_passes_a_few_cases(suite):
    rep = run_suite(suite, 8, seed=11, max_rank=6)
    assert rep.ok, rep.to_json()


def test_cases_are_deterministic():
    a = build_case("quotient", 5, 3, 6)
    b = build_case("quotient", 5, 3, 6)
    assert a.doc == b.doc and a.args == b.args
    assert build_case("quotient", 6, 3, 6).doc != a.doc


def test_dimension_suite_alternates_rings():
    assert build_case("dimension", 1, 0, 4).doc["ring"] == QQ.tag
    assert build_case("dimension", 1, 1, 4).doc["ring"] == ZZ.tag


@pytest.mark.parametrize("suite", ["biorthogonality", "codim", "quotient", "insertion", "orthogonal",
                                   "dual-decomposition", "witt"])
def test_suites_over_integers(suite):
    rep = run_suite(suite, 6, seed=2, max_rank=5, ring=ZZ)
    assert rep.ok, rep.to_json()


def test_failed_case_reports_code():
    case = build_case("sheaf", 0, 0, 4)
    case.doc["sheaves"]["E"] = {"ranks": {"0": 0}}
    ok, code, _ = run_case(case)
    assert (ok, code) in ((False, "CHECK_FAILED"), (True, ""))
