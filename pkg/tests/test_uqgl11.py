"""Quantum gl(1|1) side: E, F, R-matrices, cups, caps and the Alexander polynomial."""

from itertools import product

import pytest

from tanglefloer import uqgl11
from tanglefloer.laurent import LaurentMatrix
from tanglefloer.tanglelang import HOPF, TREFOIL, UNKNOT, crossing, parse

SEQS = [p for n in range(4) for p in product((1, -1), repeat=n)]


def braid_closure(kind, k):
    body = " ; ".join([f"{kind} 2"] * k)
    return parse(f"sign:\ncap 1 +- ; cap 3 -+ ; {body} ; cup 3 ; cup 1")


@pytest.mark.parametrize("p", SEQS)
def test_recursive_and_exterior_models_agree(p):
    assert uqgl11.ef_recursive(p) == uqgl11.ef_exterior(p)


@pytest.mark.parametrize("p", SEQS)
def test_clifford_relations(p):
    e, f = uqgl11.ef_matrices(p)
    assert (e @ e).is_zero() and (f @ f).is_zero()
    assert e @ f + f @ e == LaurentMatrix.identity(e.rows)


def test_weight_pairings():
    assert uqgl11.pairings((1, -1, 1)) == [1, -1, 1, 0]
    for p in SEQS:
        assert uqgl11.lambda_total(p) == 1


@pytest.mark.parametrize("p", [p for p in SEQS if len(p) >= 2])
def test_r_matrices_are_inverse_intertwiners(p):
    for i in range(1, len(p)):
        r, ri = uqgl11.r_matrices(p, i)
        assert r @ ri == LaurentMatrix.identity(r.rows)
        e, f = uqgl11.ef_matrices(p)
        e2, f2 = uqgl11.ef_matrices(uqgl11._swap(p, i))
        assert e2 @ r == r @ e and f2 @ r == r @ f


def test_index_and_orientation_errors():
    with pytest.raises(uqgl11.IndexOutOfRange):
        uqgl11.r_inverse_wedge((1, 1), 2)
    with pytest.raises(uqgl11.OrientationMismatch):
        uqgl11.capcup_wedge((1, 1), 1, "lcap")
    with pytest.raises(uqgl11.NotOneOneTangle):
        uqgl11.alexander(parse("sign:+ -\nxe 1"))


@pytest.mark.parametrize("k", range(1, 6))
def test_two_braid_closures_match_conway_skein(k):
    assert uqgl11.same_up_to_unit(uqgl11.alexander(braid_closure("xe", k)), uqgl11.conway_two_braid(k))
    assert uqgl11.same_up_to_unit(uqgl11.alexander(braid_closure("xo", k)), uqgl11.conway_two_braid(-k))


def test_named_knots():
    assert uqgl11.alexander(parse(UNKNOT)) == 1
    assert uqgl11.same_up_to_unit(uqgl11.alexander(parse(HOPF)), uqgl11.conway_two_braid(2))
    assert uqgl11.same_up_to_unit(uqgl11.alexander(parse(TREFOIL)), uqgl11.conway_two_braid(3))


def test_crossing_and_its_mirror_cancel():
    p = (1, -1)
    t = crossing("xe", 1, p)
    back = crossing("xo", 1, t.out_signs)
    assert uqgl11.piece_rt(t) @ uqgl11.piece_rt(back) == LaurentMatrix.identity(8)
