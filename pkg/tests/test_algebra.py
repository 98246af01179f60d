"""The strand algebra of a sign sequence."""

from itertools import product

import pytest

from tanglefloer.algebra import build_algebra, check_adjoint, check_algebra, primitive_order


@pytest.mark.parametrize("n", [0, 1, 2])
def test_algebra_axioms(n):
    for p in product((1, -1), repeat=n):
        A = build_algebra(p)
        assert check_algebra(A) is None
        assert check_adjoint(A) is None


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_dimensions_by_weight(n):
    A = build_algebra((1,) * n)
    assert A.dims_by_weight() == [A.expected_dim(n, k) for k in range(n + 2)]


def test_idempotents_are_units_on_their_block():
    A = build_algebra((1, -1))
    for s, e in A.idem.items():
        for a in A.starting_at(s):
            assert A.multiply(e, a) == a
        for a in A.ending_at(s):
            assert A.multiply(a, e) == a


def test_primitive_order_lists_all_subsets():
    order = primitive_order(2)
    assert len(order) == 8 and len(set(order)) == 8
    assert order[0] == frozenset()


def test_differential_squares_to_zero_on_sums():
    A = build_algebra((1, -1, 1))
    for i in range(len(A)):
        assert A.d_sum(A.differential(i)) == frozenset()


def test_json_tables():
    A = build_algebra((-1,))
    out = A.to_json(tables=True)
    assert out["signs"] == [-1]
    assert out["dimension"] == len(build_algebra((-1,))) == 1 + 4 + 2
    assert {"generators", "differential", "products"} <= set(out)
