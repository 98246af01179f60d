"""Golden crossing blocks, and where the printed mixed-sign blocks disagree."""

import pytest

from tanglefloer import efmod, reference
from tanglefloer.ctmod import build_ct
from tanglefloer.k0 import PrimitiveBasis, k0_matrix, piece_matrix
from tanglefloer.laurent import STAB, LaurentMatrix, LaurentPoly
from tanglefloer.verify import TWO, e_crossing

MIXED = [(1, -1), (-1, 1)]
FACTOR = STAB ** reference.CROSSING_EXPONENT


def assemble(blocks):
    """Place weight blocks at their primitive-order positions."""
    b = PrimitiveBasis(2)
    data = [[LaurentPoly()] * len(b) for _ in range(len(b))]
    for k, blk in enumerate(blocks):
        idx = [b.index(s) for s in b.of_size(k)]
        for i, r in enumerate(idx):
            for j, c in enumerate(idx):
                data[r][c] = blk[i, j] * FACTOR
    return LaurentMatrix(len(b), len(b), data)


@pytest.mark.parametrize("p", TWO)
@pytest.mark.parametrize("k", [0, 1, 3])
def test_crossing_blocks_agree_outside_weight_two(p, k):
    assert k0_matrix(build_ct(e_crossing(p)), weight=k) == reference.CROSSING_BLOCKS[p][k] * FACTOR


@pytest.mark.parametrize("p", [(1, 1), (-1, -1)])
def test_same_sign_crossings_agree_in_full(p):
    assert piece_matrix(e_crossing(p)) == assemble(reference.CROSSING_BLOCKS[p])


def test_mixed_crossing_weight_two_blocks_interchanged():
    a, b = MIXED
    ours_a = k0_matrix(build_ct(e_crossing(a)), weight=2)
    ours_b = k0_matrix(build_ct(e_crossing(b)), weight=2)
    assert ours_a != reference.CROSSING_BLOCKS[a][2] * FACTOR
    assert ours_a == reference.CROSSING_BLOCKS[b][2] * FACTOR
    assert ours_b == reference.CROSSING_BLOCKS[a][2] * FACTOR


@pytest.mark.parametrize("p", MIXED)
def test_printed_mixed_blocks_break_commutation(p):
    t = e_crossing(p)
    printed = assemble(reference.CROSSING_BLOCKS[p])
    ours = piece_matrix(t)
    for side in ("E", "F"):
        assert efmod.commutes_with(ours, t.in_signs, t.out_signs, side)
        assert not efmod.commutes_with(printed, t.in_signs, t.out_signs, side)
