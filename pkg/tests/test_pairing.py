import random

import pytest
from hypothesis import given, settings, strategies as st

from sheafpair import instances as gen
from sheafpair.errors import FlagMismatch, NotADecomposition, NotASummand, NotOrthosymmetric, ShapeError
from sheafpair.linalg import kernel_basis, rank, same_span
from sheafpair.matrix import Matrix
from sheafpair.pairing import (Pairing, Side, biorthogonal_closure, canonical_pairing, codim_report,
                               dual_projections, dual_restriction, insertion_left, insertion_right,
                               is_nondegenerate, is_unimodular, left_kernel, orthogonal,
                               orthogonal_sum, orthogonal_via_insertion, pairing_rank,
                               quotient_embedding_dual, quotient_pairing, radical, right_kernel,
                               validate_pairing)
from sheafpair.rings import QQ, ZZ
from sheafpair.sheaf import SheafModule
from sheafpair.topology import catalog, discrete, indiscrete, sierpinski

from conftest import J4_ROWS, qq, zz
from oracles import bilinear, rank_rowreduce

seeds = st.integers(0, 2**32)


def top(p):
    return p.space.top


def point_free(n, ring=QQ):
    return SheafModule.free(indiscrete(1), ring, n)


# --- validation --------------------------------------------------------------


def test_constant_gram_on_constant_sheaf_validates():
    sp = sierpinski()
    e = SheafModule.constant(sp, QQ, 2)
    p = Pairing.constant(e, e, qq([[1, 2], [3, 4]]))
    assert validate_pairing(p).ok


def test_altered_gram_names_the_pair():
    sp = sierpinski()
    e = SheafModule.constant(sp, QQ, 2)
    p = Pairing.constant(e, e, qq([[1, 0], [0, 1]]))
    grams = dict(p.gram)
    small = sp.index(0b10)
    grams[small] = qq([[1, 0], [0, 2]])
    rep = validate_pairing(Pairing(e, e, grams))
    assert rep.kinds() == {"COMPATIBILITY"}
    assert rep.violations[0].where == (sp.top, small)


def test_flags(j2):
    assert validate_pairing(j2).ok
    sym = Pairing.on_free(qq([[0, 1], [-1, 0]]), flags=("symmetric",))
    assert validate_pairing(sym).kinds() == {"FLAG"}
    weird = Pairing.on_free(qq([[1]]), flags=("hermitian",))
    assert "UNKNOWN_FLAG" in validate_pairing(weird).kinds()


# --- kernels and orthogonals -------------------------------------------------


def test_right_kernel_examples(j2):
    assert right_kernel(j2).is_zero()
    p = Pairing.on_free(qq([[0, 0], [0, 1]]))
    k = right_kernel(p)
    assert k.side is Side.RIGHT_PERP
    assert same_span(k[top(p)], qq([[1], [0]]))
    z = Pairing.on_free(Matrix.zeros(QQ, 2, 3))
    assert right_kernel(z)[top(z)].rank == 3
    assert left_kernel(z)[top(z)].rank == 2


def test_left_kernel_mirrors_right_kernel():
    g = qq([[0, 1], [0, 0]])
    p = Pairing.on_free(g)
    assert same_span(left_kernel(p)[1], qq([[0], [1]]))
    assert same_span(right_kernel(p)[1], qq([[1], [0]]))


def test_orthogonal_examples(j2):
    e3 = point_free(3)
    nu = canonical_pairing(e3)
    g = orthogonal(nu, qq([[1], [0], [0]]))
    assert same_span(g[1], qq([[0, 0], [1, 0], [0, 1]]))
    assert same_span(orthogonal(j2, qq([[1], [0]]))[1], qq([[1], [0]]))
    assert orthogonal(j2, Matrix.zeros(QQ, 2, 0))[1].rank == 2


def test_orthogonal_shape_error(j2):
    with pytest.raises(ShapeError):
        orthogonal(j2, qq([[1], [0], [0]]))


def test_orthogonal_on_a_space_is_restriction_compatible():
    sp = catalog()["chain-3"]
    e = SheafModule.constant(sp, QQ, 3)
    p = Pairing.constant(e, e, qq([[1, 2, 0], [2, 4, 0], [0, 0, 1]]))
    assert validate_pairing(p).ok
    res = orthogonal(p, qq([[1], [0], [0]]))
    for u, v in sp.inclusions():
        r = e.restrict(u, v)
        for vec in res[u].vectors():
            moved = r @ Matrix.column_vector(QQ, vec)
            assert rank(res[v].generators.hstack(moved)) == res[v].rank


def test_radical_examples(j2, j4):
    assert radical(j2).is_zero()
    iso = qq([[1, 0], [0, 0], [0, 1], [0, 0]])
    assert same_span(radical(j4, iso)[1], iso)
    assert radical(j4, qq([[1, 0], [0, 1], [0, 0], [0, 0]]))[1].rank == 0
    with pytest.raises(NotOrthosymmetric):
        radical(Pairing.on_free(qq([[1, 1], [0, 1]])))


def test_nondegeneracy_predicates():
    assert is_nondegenerate(Pairing.on_free(Matrix.identity(QQ, 3)))
    assert not is_nondegenerate(Pairing.on_free(qq([[0, 0], [0, 1]])))
    two = Pairing.on_free(zz([[2]]))
    assert is_nondegenerate(two) and not is_unimodular(two)


# --- canonical pairing and insertions ----------------------------------------


def test_canonical_pairing_examples():
    nu = canonical_pairing(point_free(3))
    assert nu.gram[1] == Matrix.identity(QQ, 3)
    assert canonical_pairing(point_free(0)).gram[1].shape == (0, 0)
    d2 = discrete(2)
    e = SheafModule.build(d2, QQ, {d2.index(1): 1, d2.index(2): 2, d2.index(3): 3},
                          {(d2.index(3), d2.index(1)): qq([[1, 0, 0]]),
                           (d2.index(3), d2.index(2)): qq([[0, 1, 0], [0, 0, 1]])})
    grams = canonical_pairing(e).gram
    assert [grams[u].shape for u in range(4)] == [(0, 0), (1, 1), (2, 2), (3, 3)]


def test_canonical_pairing_on_connected_space_validates():
    sp = catalog()["diamond-4"]
    e = SheafModule.constant(sp, QQ, 2)
    nu = canonical_pairing(e)
    assert validate_pairing(nu).ok


def test_insertion_examples(j2):
    assert insertion_right(j2)[1] == j2.gram[1]
    assert kernel_basis(insertion_left(j2)[1]).rank == 0
    z = Pairing.on_free(Matrix.zeros(QQ, 2, 2))
    assert insertion_left(z)[1].is_zero()
    ones = Pairing.on_free(qq([[1, 1], [1, 1]]))
    assert rank(insertion_left(ones)[1]) == 1 == rank(insertion_right(ones)[1])


def test_insertion_left_evaluates_the_form(rng):
    g = gen.matrix(rng, QQ, 3, 4)
    p = Pairing.on_free(g)
    s = [rng.randint(-3, 3) for _ in range(3)]
    t = [rng.randint(-3, 3) for _ in range(4)]
    functional = (insertion_left(p)[1] @ Matrix.column_vector(QQ, s)).column(0)
    assert sum(a * b for a, b in zip(functional, t)) == bilinear(g.to_lists(), s, t)


def test_pairing_rank_examples(rng):
    assert pairing_rank(Pairing.on_free(Matrix.identity(QQ, 4)))[1] == 4
    assert pairing_rank(Pairing.on_free(qq([[0, 0], [0, 1]])))[1] == 1
    g = gen.matrix(random.Random(5), QQ, 3, 5)
    assert pairing_rank(Pairing.on_free(g))[1] == rank_rowreduce(g.to_lists())


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_orthogonal_equals_insertion_route(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 5), rng.randint(1, 5)
    g = gen.low_rank(rng, QQ, m, n, rng.randint(0, min(m, n)))
    p = Pairing.on_free(g)
    for within, size in (("E", m), ("F", n)):
        s = gen.saturated_submodule(rng, QQ, size)
        a = orthogonal(p, s, within)
        b = orthogonal_via_insertion(p, s, within)
        assert same_span(a[1], b[1])
        other = n if within == "E" else m
        assert a[1].rank >= other - s.ncols


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_double_orthogonal_for_nondegenerate_forms(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    p = Pairing.on_free(gen.invertible(rng, QQ, n))
    s = gen.saturated_submodule(rng, QQ, n)
    perp = orthogonal(p, s)
    assert perp[1].rank == n - s.ncols
    assert same_span(orthogonal(p, perp.parts, "F")[1], s)


# --- dual-side identities ----------------------------------------------------


def test_dual_projections_examples():
    e = point_free(2)
    p1, p2 = dual_projections(e, qq([[1], [0]]), qq([[0], [1]]))
    assert p1[1] == qq([[0, 0], [0, 1]]) and p2[1] == qq([[1, 0], [0, 0]])
    p1, p2 = dual_projections(e, Matrix.zeros(QQ, 2, 0), Matrix.identity(QQ, 2))
    assert p1[1] == Matrix.identity(QQ, 2) and p2[1].is_zero()
    p1, p2 = dual_projections(e, qq([[1], [1]]), qq([[1], [-1]]))
    for p in (p1[1], p2[1]):
        assert p @ p == p
    with pytest.raises(NotADecomposition):
        dual_projections(e, qq([[1], [1]]), qq([[2], [2]]))


def test_biorthogonal_examples():
    e = point_free(3)
    assert same_span(biorthogonal_closure(e, qq([[1], [0], [0]]))[1], qq([[1], [0], [0]]))
    assert biorthogonal_closure(e, Matrix.zeros(QQ, 3, 0))[1].rank == 0
    assert same_span(biorthogonal_closure(e, qq([[1], [2], [3]]))[1], qq([[1], [2], [3]]))
    with pytest.raises(NotASummand):
        biorthogonal_closure(point_free(2, ZZ), zz([[2], [0]]))


def test_codim_examples(rng):
    e = point_free(4)
    assert codim_report(e, qq([[1], [0], [0], [0]]))[1].as_tuple() == (1, 3, 3, 1)
    assert codim_report(e, Matrix.identity(QQ, 4))[1].as_tuple() == (4, 0, 0, 4)
    s = gen.saturated_submodule(random.Random(3), QQ, 5, 2)
    assert codim_report(point_free(5), s)[1].as_tuple() == (2, 3, 3, 2)
    assert codim_report(point_free(5), s, dual=True)[1].as_tuple() == (2, 3, 3, 2)


def test_dual_restriction_examples():
    e = point_free(2)
    surj, kern = dual_restriction(e, qq([[1], [0]]))
    assert surj[1] == qq([[1, 0]]) and same_span(kern[1], qq([[0], [1]]))
    surj, kern = dual_restriction(e, Matrix.identity(QQ, 2))
    assert surj[1] == Matrix.identity(QQ, 2) and kern[1].rank == 0
    surj, kern = dual_restriction(e, qq([[1], [1]]))
    assert surj[1] == qq([[1, 1]]) and same_span(kern[1], qq([[1], [-1]]))


def test_quotient_embedding_examples():
    lam = quotient_embedding_dual(point_free(3), qq([[1], [0], [0]]))[1]
    assert same_span(lam, qq([[0, 0], [1, 0], [0, 1]]))
    assert quotient_embedding_dual(point_free(2), Matrix.zeros(QQ, 2, 0))[1] == Matrix.identity(QQ, 2)
    assert same_span(quotient_embedding_dual(point_free(2), qq([[1], [1]]))[1], qq([[1], [-1]]))


def test_quotient_pairing_examples(j4):
    q = quotient_pairing(Pairing.on_free(qq([[0, 0], [0, 1]])))
    assert q.gram[1] == qq([[1]]) and is_nondegenerate(q)
    assert quotient_pairing(j4).gram[1] == j4.gram[1]
    z = quotient_pairing(Pairing.on_free(Matrix.zeros(QQ, 2, 3)))
    assert z.E.ranks[1] == 0 and z.F.ranks[1] == 0


def test_quotient_pairing_keeps_flags_of_symmetric_forms():
    p = Pairing.on_free(qq([[1, 1, 0], [1, 1, 0], [0, 0, 2]]), flags=("symmetric",))
    q = quotient_pairing(p)
    assert q.flags == frozenset({"symmetric"}) and validate_pairing(q).ok


def test_orthogonal_sum_examples(j2, j4):
    assert orthogonal_sum([j2, j2]).gram[1] == j4.gram[1]
    assert orthogonal_sum([j2]) is j2
    a = Pairing.on_free(qq([[1]]))
    b = Pairing.on_free(qq([[1, 2], [3, 4]]))
    assert orthogonal_sum([a, b]).gram[1].to_lists() == [[1, 0, 0], [0, 1, 2], [0, 3, 4]]
    with pytest.raises(FlagMismatch):
        orthogonal_sum([a, j2])


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_quotient_ranks_match_pairing_rank(seed):
    rng = random.Random(seed)
    g = gen.degenerate_gram(rng, QQ, 5)
    p = Pairing.on_free(g)
    q = quotient_pairing(p)
    r = pairing_rank(p)[1]
    assert q.E.ranks[1] == q.F.ranks[1] == r
    assert is_nondegenerate(q)


def test_integer_quotient_pairing_is_nondegenerate_but_maybe_not_unimodular():
    p = Pairing.on_free(zz([[2, 0], [0, 0]]))
    q = quotient_pairing(p)
    assert q.gram[1] == zz([[2]])
    assert is_nondegenerate(q) and not is_unimodular(q)


def test_standard_j4_fixture_matches_rows(j4):
    assert j4.gram[1].to_lists() == [[x for x in r] for r in J4_ROWS]
