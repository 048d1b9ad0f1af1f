import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from sheafpair import instances as gen
from sheafpair.errors import (DegenerateForm, DegenerateGram, DisconnectedSpace, IsotropicInput,
                              NoUnitPartner, NotIsotropic, NotOrthosymmetric)
from sheafpair.linalg import same_span
from sheafpair.matrix import Matrix
from sheafpair.pairing import Pairing, orthogonal_sum
from sheafpair.rings import QQ, ZZ
from sheafpair.sheaf import SheafModule
from sheafpair.topology import catalog, discrete
from sheafpair.witt import (WittResult, find_partner, hyperbolic_decomposition, residual_pairing,
                            split_nonisotropic, verify_witt)

from conftest import qq, zz
from oracles import bilinear, det_laplace

E = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
ISO = qq([[1, 0], [0, 0], [0, 1], [0, 0]])


def test_partner_on_standard_form(j4, j2):
    s, c = find_partner(j4, E[0], E)
    assert s == (0, 1, 0, 0) and c == 1
    s, c = find_partner(j2, (1, 0), [(1, 0), (0, 1)])
    assert s == (0, 1) and c == 1


def test_partner_rejects_degenerate_gram():
    p = Pairing.on_free(Matrix.zeros(QQ, 2, 2), flags=("skew",))
    with pytest.raises(DegenerateGram):
        find_partner(p, (1, 0), [(1, 0), (0, 1)])


def test_partner_reorders_the_basis(j4):
    s, c = find_partner(j4, E[2], E)
    assert bilinear(j4.gram[1].to_lists(), E[2], s) == c == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_partner_value_is_the_determinant(seed):
    rng = random.Random(seed)
    n = 2 * rng.randint(1, 3)
    g = gen.nondegenerate_skew(rng, QQ, n)
    p = Pairing.on_free(g, flags=("skew",))
    basis = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    s, c = find_partner(p, basis[0], basis)
    assert c == det_laplace(g.to_lists()) != 0
    assert bilinear(g.to_lists(), basis[0], s) == c


def test_split_examples(j4):
    s, perp = split_nonisotropic(j4, qq([[1, 0], [0, 1], [0, 0], [0, 0]]))
    assert same_span(perp, qq([[0, 0], [0, 0], [1, 0], [0, 1]]))
    s, perp = split_nonisotropic(j4, Matrix.identity(QQ, 4))
    assert perp.rank == 0
    with pytest.raises(IsotropicInput):
        split_nonisotropic(j4, qq([[1], [0], [0], [0]]))


def test_decomposition_of_standard_instance(j4):
    w = hyperbolic_decomposition(j4, ISO)
    assert [(p.r, p.s) for p in w.planes] == [((1, 0, 0, 0), (0, 1, 0, 0)), ((0, 0, 1, 0), (0, 0, 0, 1))]
    assert w.residual.rank == 0
    assert verify_witt(j4, ISO, w).ok


def test_decomposition_base_case(j2):
    w = hyperbolic_decomposition(j2, qq([[1], [0]]))
    assert len(w.planes) == 1 and w.planes[0].s == (0, 1) and w.planes[0].c == 1


def test_empty_isotropic_submodule(j4):
    w = hyperbolic_decomposition(j4, Matrix.zeros(QQ, 4, 0))
    assert w.planes == [] and w.residual.rank == 4
    assert verify_witt(j4, Matrix.zeros(QQ, 4, 0), w).ok


def test_verify_catches_degenerate_plane(j4):
    w = hyperbolic_decomposition(j4, ISO)
    bad = replace(w.planes[0], s=w.planes[0].r)
    rep = verify_witt(j4, ISO, WittResult([bad, w.planes[1]], w.residual))
    assert not rep.ok and "PLANE_DEGENERATE" in rep.kinds()


def test_verify_accepts_swapped_planes(j4):
    w = hyperbolic_decomposition(j4, ISO)
    swapped = WittResult(list(reversed(w.planes)), w.residual)
    assert verify_witt(j4, ISO, swapped).ok


def test_decomposition_errors(j4):
    with pytest.raises(NotIsotropic):
        hyperbolic_decomposition(j4, qq([[1, 0], [0, 1], [0, 0], [0, 0]]))
    degenerate = Pairing.on_free(qq([[0, 1, 0], [-1, 0, 0], [0, 0, 0]]), flags=("skew",))
    with pytest.raises(DegenerateForm):
        hyperbolic_decomposition(degenerate, qq([[1], [0], [0]]))
    with pytest.raises(NotOrthosymmetric):
        hyperbolic_decomposition(Pairing.on_free(j4.gram[1]), ISO)
    d2 = discrete(2)
    e = SheafModule.free(d2, QQ, 2)
    p = Pairing.constant(e, e, qq([[0, 1], [-1, 0]]), flags=("skew",))
    with pytest.raises(DisconnectedSpace):
        hyperbolic_decomposition(p, qq([[1], [0]]))


def test_integer_form_without_unit_partner():
    p = Pairing.on_free(zz([[0, 2], [-2, 0]]), flags=("skew",))
    with pytest.raises(NoUnitPartner):
        hyperbolic_decomposition(p, zz([[1], [0]]))


def test_integer_decomposition_uses_bezout_combinations():
    rng = random.Random(4)
    for _ in range(20):
        g, f = gen.isotropic_instance(rng, ZZ, rng.randint(1, 3))
        p = Pairing.on_free(g, flags=("skew",))
        w = hyperbolic_decomposition(p, f)
        assert verify_witt(p, f, w).ok


def test_planes_on_a_connected_space():
    sp = catalog()["chain-3"]
    e = SheafModule.constant(sp, QQ, 4)
    from conftest import J4_ROWS
    p = Pairing.constant(e, e, qq(J4_ROWS), flags=("skew",))
    w = hyperbolic_decomposition(p, ISO)
    assert verify_witt(p, ISO, w).ok
    assert all(len(w.by_open[u]) == 2 for u in sp.nonempty())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_decomposition_is_a_congruence(seed):
    rng = random.Random(seed)
    half = rng.randint(1, 4)
    g, f = gen.isotropic_instance(rng, QQ, half)
    p = Pairing.on_free(g, flags=("skew",))
    w = hyperbolic_decomposition(p, f)
    assert verify_witt(p, f, w).ok
    assert 2 * len(w.planes) + w.residual.rank == 2 * half
    pieces = [Pairing.on_free(qq([[0, 1], [-1, 0]]), flags=("skew",)) for _ in w.planes]
    if w.residual.rank:
        pieces.append(Pairing.on_free(residual_pairing(p, w), flags=("skew",)))
    b = w.basis()
    assert b.det() != 0
    assert b.T @ g @ b == orthogonal_sum(pieces).gram[1]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_random_skew_forms_and_random_isotropic_lines(seed):
    # any nonzero vector is isotropic for a skew form
    rng = random.Random(seed)
    n = 2 * rng.randint(1, 3)
    g = gen.nondegenerate_skew(rng, QQ, n)
    p = Pairing.on_free(g, flags=("skew",))
    v = qq([[rng.randint(-3, 3)] for _ in range(n)])
    if v.is_zero():
        return
    w = hyperbolic_decomposition(p, v)
    assert verify_witt(p, v, w).ok
