"""Euler characteristic matrices and their normalisation."""

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tanglefloer.ctmod import build_ct
from tanglefloer.k0 import (
    PrimitiveBasis,
    addstrand_transform,
    exponent_check,
    k0_matrix,
    matrix_json,
    normalize,
    piece_matrix,
    weight_blocks,
    word_matrix,
)
from tanglefloer.laurent import STAB, LaurentMatrix, NotDivisible
from tanglefloer.tanglelang import TangleWord, crossing, elementary_tangles, parse, trivial
from tanglefloer.uqgl11 import rt_evaluate


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_trivial_piece_is_a_stabilised_identity(n):
    for p in product((1, -1), repeat=n):
        t = trivial(p)
        assert piece_matrix(t) == LaurentMatrix.identity(1 << (n + 1)) * STAB ** n
        assert normalize(piece_matrix(t), t) == LaurentMatrix.identity(1 << (n + 1))


def test_weight_blocks_reassemble_the_matrix():
    m = piece_matrix(crossing("xe", 1, (1, -1)))
    blocks = weight_blocks(m, 2, 2)
    assert [b.rows for b in blocks] == [1, 3, 3, 1]
    assert sum(b.rows for b in blocks) == m.rows


def test_weight_restriction_matches_blocks():
    m = build_ct(crossing("xo", 1, (1, 1)))
    full = k0_matrix(m)
    for k, blk in enumerate(weight_blocks(full, 2, 2)):
        assert k0_matrix(m, weight=k) == blk


@pytest.mark.parametrize("t", elementary_tangles(2), ids=lambda t: f"{t.token()} {t.in_signs}")
def test_normalized_pieces_equal_quantum_invariant(t):
    assert normalize(piece_matrix(t), t) == rt_evaluate(TangleWord.from_pieces([t]))


def test_over_normalising_raises():
    t = crossing("xe", 1, (1, 1))
    with pytest.raises(NotDivisible):
        normalize(piece_matrix(t), t.size + 1)
    assert exponent_check(piece_matrix(t), t.size)
    assert not exponent_check(piece_matrix(t), t.size + 1)


def test_word_matrix_is_multiplicative():
    w = parse("sign:+ -\nxe 1 ; xo 1 ; xe 1")
    a, b = parse("sign:+ -\nxe 1"), parse("sign:- +\nxo 1 ; xe 1")
    assert word_matrix(w) == word_matrix(a) @ word_matrix(b)


def test_addstrand_argument_checks():
    m = piece_matrix(crossing("xe", 1, (1, -1)))
    with pytest.raises(ValueError):
        addstrand_transform(m, side="left")
    with pytest.raises(ValueError):
        addstrand_transform(m, orientation=0)


def test_addstrand_matches_direct_three_strand_matrix():
    t = crossing("xo", 1, (-1, 1))
    assert addstrand_transform(piece_matrix(t), "above") == piece_matrix(crossing("xo", 1, (-1, 1, 1)))
    assert addstrand_transform(piece_matrix(t), "below") == piece_matrix(crossing("xo", 2, (1, -1, 1)))


@given(st.integers(0, 4))
def test_primitive_basis_is_a_bijection(n):
    b = PrimitiveBasis(n)
    assert len(b) == 1 << (n + 1)
    assert [b.index(s) for s in b.subsets] == list(range(len(b)))


def test_matrix_json_labels():
    out = matrix_json(LaurentMatrix.identity(4), 1, 1)
    assert out["row_labels"] == out["col_labels"]
    assert len(out["row_labels"]) == 4
