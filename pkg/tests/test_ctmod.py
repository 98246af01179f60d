"""Tangle bimodules of elementary pieces and closed words."""

import pytest

from tanglefloer.ctmod import (
    StripFailed,
    WordTooLarge,
    bimodule_dims,
    build_ct,
    build_ct_word,
    check_piece,
    direct_two_piece_dims,
    graded_euler,
    hfk,
    weight_piece,
)
from tanglefloer.homcore import box_tensor, dims_euler
from tanglefloer.laurent import LaurentPoly, equal_up_to_unit
from tanglefloer.tanglelang import HOPF, UNKNOT, cap, crossing, cup, elementary_tangles, parse, trivial
from tanglefloer.uqgl11 import alexander

Q = LaurentPoly.monomial(1)


@pytest.mark.parametrize("t", elementary_tangles(2), ids=lambda t: f"{t.token()} {t.in_signs}")
def test_two_strand_pieces_satisfy_structure_equations(t):
    assert check_piece(t) is None


def test_weights_partition_the_generators():
    m = build_ct(crossing("xo", 1, (-1, 1)))
    sizes = [len(weight_piece(m, k)) for k in range(4)]
    assert sum(sizes) == len(m)
    assert all(sizes)


def test_gradings_are_integral_pairs():
    m = build_ct(cap(1, (1,), (-1, 1)))
    assert all(isinstance(a, int) and isinstance(b, int) for a, b in m.gradings)


@pytest.mark.parametrize(
    "t1,t2",
    [
        (crossing("xe", 1, (1, -1)), crossing("xo", 1, (-1, 1))),
        (cap(1, (), (1, -1)), cup(1, (1, -1))),
        (trivial((1, 1)), crossing("xe", 1, (1, 1))),
    ],
)
def test_box_tensor_matches_direct_enumeration(t1, t2):
    assert bimodule_dims(box_tensor(build_ct(t1), build_ct(t2))) == direct_two_piece_dims(t1, t2)


def test_unknot_homology():
    res = hfk(parse(UNKNOT))
    assert res["homology"] == {(0, 0): 1}
    assert res["components"] == 1 and res["symmetric"]


def test_hopf_link_homology():
    res = hfk(parse(HOPF))
    assert res["homology"] == {(-1, -2): 1, (0, 0): 2, (1, 2): 1}
    assert res["components"] == 2
    assert hfk(parse(HOPF), 1)["homology"] == res["homology"]
    # a two-component link carries one extra factor of (q - q^-1)
    chi = graded_euler(res["homology"])
    assert equal_up_to_unit(chi, alexander(parse(HOPF)) * (Q - Q ** -1))[0]


def test_closed_word_euler_vanishes_before_stripping():
    # the stabilisation factor (1 + m^-1) evaluates to zero at m = -1
    m = build_ct_word(parse(UNKNOT))
    assert len(m) > 0
    assert dims_euler(m.dims()) == 0


def test_hfk_needs_a_closed_word():
    with pytest.raises((ValueError, ArithmeticError)):
        hfk(parse("sign:+ -\nxe 1"))


def test_strip_failure_is_arithmetic():
    assert issubclass(StripFailed, ArithmeticError)


def test_word_fold_respects_generator_limit():
    with pytest.raises(WordTooLarge):
        build_ct_word(parse(HOPF), max_generators=1000)
    assert len(build_ct_word(parse(UNKNOT), max_generators=1000)) == 24
