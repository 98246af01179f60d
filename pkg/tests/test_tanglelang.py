"""Tangle words: parsing, validation and topology."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tanglefloer.tanglelang import (
    HOPF,
    TREFOIL,
    UNKNOT,
    BoundaryMismatch,
    OrientationError,
    TangleSyntaxError,
    TangleWord,
    cap,
    components,
    crossing,
    cup,
    cut_plat,
    elementary_tangles,
    parse,
    print_word,
    signs,
    size,
)


def test_signs_from_text_and_tuples():
    assert signs("+-+") == (1, -1, 1)
    assert signs("+, -") == (1, -1)
    assert signs([1, -1]) == (1, -1)
    with pytest.raises(TangleSyntaxError):
        signs("+x")
    with pytest.raises(TangleSyntaxError):
        signs([2])


def test_named_words():
    for text, loops, total in ((UNKNOT, 1, 2), (HOPF, 2, 16), (TREFOIL, 1, 20)):
        w = parse(text)
        assert w.closed
        assert components(w) == loops
        assert size(w) == total


def test_print_parse_round_trip():
    for text in (UNKNOT, HOPF, TREFOIL, "sign:+ -\nxe 1 ; id ; xo 1", "sign:+\ncap 2 -+ ; cup 1"):
        w = parse(text)
        assert parse(print_word(w)) == w


def test_piece_errors():
    with pytest.raises(TangleSyntaxError):
        parse("cup 1")
    with pytest.raises(TangleSyntaxError):
        parse("sign:+ -\nswirl 1")
    with pytest.raises(TangleSyntaxError):
        parse("sign:+ -\ncap 1")
    with pytest.raises(BoundaryMismatch):
        parse("sign:+ -\nxe 2")
    with pytest.raises(BoundaryMismatch):
        parse("sign:+ -\nid3")
    with pytest.raises(OrientationError):
        parse("sign:+ +\ncup 1")
    with pytest.raises(OrientationError):
        cap(1, (), (1, 1))


def test_word_boundaries_must_chain():
    with pytest.raises(BoundaryMismatch):
        TangleWord.from_pieces([crossing("xe", 1, (1, -1)), crossing("xe", 1, (1, -1))])


def test_size_is_half_the_boundary_points():
    assert crossing("xe", 1, (1, -1)).size == 2
    assert cup(1, (1, -1)).size == 1
    assert cap(1, (1,), (1, -1)).size == 2


def test_reversal_is_an_involution():
    w = parse(TREFOIL)
    assert w.reversed().reversed() == w
    assert components(w.reversed()) == components(w)


def test_cut_plat_gives_a_one_one_tangle():
    cut = cut_plat(parse(TREFOIL))
    assert len(cut.boundary0) == 1 and len(cut.boundary1) == 1
    assert components(cut) == 1


def test_elementary_tangle_count_grows():
    assert len(elementary_tangles(0)) == 1
    assert len(elementary_tangles(2)) == 19


@given(st.lists(st.sampled_from([1, -1]), min_size=2, max_size=5), st.data())
def test_crossings_swap_adjacent_signs(p, data):
    p = tuple(p)
    i = data.draw(st.integers(1, len(p) - 1))
    t = crossing(data.draw(st.sampled_from(["xe", "xo"])), i, p)
    assert sorted(t.out_signs) == sorted(p)
    assert t.out_signs[i - 1] == p[i] and t.out_signs[i] == p[i - 1]
    assert components(TangleWord.from_pieces([t])) == len(p)
