import sys
import random

import pytest

from sheafpair.matrix import Matrix
from sheafpair.pairing import Pairing
from sheafpair.rings import QQ, ZZ
from sheafpair.sheaf import SheafModule
from sheafpair.topology import FiniteSpace, discrete, sierpinski

J4_ROWS = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]


def qq(rows, ncols=None):
    return Matrix(QQ, rows, len(rows), ncols)


def zz(rows, ncols=None):
    return Matrix(ZZ, rows, len(rows), ncols)


def cols(ring, *vectors):
    n = len(vectors[0])
    return Matrix.from_columns(ring, [list(v) for v in vectors], n)


@pytest.fixture
def rng():
    return random.Random(20240517)


@pytest.fixture
def j4():
    return Pairing.on_free(qq(J4_ROWS), flags=("skew",))


@pytest.fixture
def j2():
    return Pairing.on_free(qq([[0, 1], [-1, 0]]), flags=("skew",))


def _broken(name):
    """Hand-built presheaves that each break one law, with the violation they should raise."""
    sp = sierpinski()
    top, one, empty = sp.index(0b11), sp.index(0b10), sp.index(0)
    chain = FiniteSpace.from_sets(3, [[], [2], [1, 2], [0, 1, 2]])
    d2 = discrete(2)
    d_top, d0, d1 = d2.index(0b11), d2.index(0b01), d2.index(0b10)
    if name == "composition":
        m = SheafModule.build(chain, QQ, [0, 1, 1, 1],
                              {(3, 2): qq([[1]]), (2, 1): qq([[1]]), (3, 1): qq([[2]])})
        return m, "COMPOSITION"
    if name == "identity":
        m = SheafModule.build(sp, QQ, {top: 1, one: 1}, {(top, top): qq([[3]])})
        return m, "IDENTITY"
    if name == "nonzero-empty":
        m = SheafModule.build(sp, QQ, {empty: 1, one: 1, top: 1})
        return m, "NONZERO_EMPTY"
    if name == "locality":
        # a section over the whole space that vanishes on both points
        m = SheafModule.build(d2, QQ, {d_top: 2, d0: 1, d1: 1},
                              {(d_top, d0): qq([[1, 1]]), (d_top, d1): qq([[1, 1]])})
        return m, "LOCALITY"
    if name == "gluing":
        # nothing over the whole space, a line over each point
        m = SheafModule.build(d2, QQ, {d_top: 0, d0: 1, d1: 1})
        return m, "GLUING"
    raise KeyError(name)


BROKEN_NAMES = ["composition", "identity", "nonzero-empty", "locality", "gluing"]


@pytest.fixture(params=BROKEN_NAMES)
def broken_presheaf(request):
    return _broken(request.param)


@pytest.fixture
def broken_presheaf_catalog():
    return {name: _broken(name) for name in BROKEN_NAMES}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
