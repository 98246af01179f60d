"""Partial bijections, crossing counts and gradings of strand diagrams."""

from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tanglefloer import strand
from tanglefloer.strand import (
    algebra_context,
    compose,
    concat,
    grade_algebra,
    identity,
    introductions,
    inversions,
    pb,
    resolutions,
    total_crossings,
)

sign_seqs = st.lists(st.sampled_from([1, -1]), min_size=1, max_size=3).map(tuple)


@st.composite
def diagrams(draw):
    p = draw(sign_seqs)
    n = len(p)
    k = draw(st.integers(0, n + 1))
    src = sorted(draw(st.permutations(range(n + 1)))[:k])
    tgt = draw(st.permutations(range(n + 1)))[:k]
    return p, pb(zip(src, tgt))


def test_pb_rejects_non_injective():
    with pytest.raises(ValueError):
        pb([(0, 1), (1, 1)])
    with pytest.raises(ValueError):
        pb([(0, 1), (0, 2)])


def test_identity_has_no_crossings():
    ctx = algebra_context((1, -1, 1))
    x = identity({0, 2, 3})
    assert total_crossings(x, ctx) == 0
    assert grade_algebra(x, ctx) == (0, 0)
    assert compose(x, x) == x


def test_single_strand_gradings_follow_red_orientation():
    # one black strand from 0 to 1 crosses the red strand at 1/2
    assert grade_algebra(pb([(0, 1)]), algebra_context((1,))) == (-1, -1)
    assert grade_algebra(pb([(0, 1)]), algebra_context((-1,))) == (0, 1)


@given(diagrams())
def test_resolutions_and_introductions_are_adjoint(d):
    p, x = d
    ctx = algebra_context(p)
    for y in resolutions(x, ctx):
        assert x in introductions(y, ctx)
        assert total_crossings(y, ctx) == total_crossings(x, ctx) - 1
        m, a = grade_algebra(x, ctx)
        assert grade_algebra(y, ctx) == (m - 1, a)


@given(diagrams())
def test_inversions_bound_crossings(d):
    p, x = d
    assert 0 <= inversions(x) <= total_crossings(x, algebra_context(p))


def test_concat_is_additive_on_gradings():
    p = (1, -1)
    ctx = algebra_context(p)
    gens = [pb(zip(range(k), t)) for k in range(3) for t in permutations(range(3), k)]
    seen = 0
    for x in gens:
        for y in gens:
            z = concat(x, y, ctx, ctx)
            if z is None:
                continue
            seen += 1
            gx, gy = grade_algebra(x, ctx), grade_algebra(y, ctx)
            assert grade_algebra(z, ctx) == (gx[0] + gy[0], gx[1] + gy[1])
    assert seen > 0


def test_count_crossings_splits_by_orientation():
    c = strand.count_crossings(pb([(0, 2)]), algebra_context((1, -1)))
    assert (c.black_left, c.black_right, c.black_black) == (1, 1, 0)
