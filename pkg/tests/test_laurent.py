"""Exact Laurent polynomials and matrices over Z[q, q^-1]."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tanglefloer.laurent import (
    STAB,
    LaurentMatrix,
    LaurentPoly,
    NotDivisible,
    det,
    equal_up_to_unit,
    exact_divide,
    inverse_unimodular,
    mat,
    symmetrize,
)

polys = st.dictionaries(st.integers(-6, 6), st.integers(-5, 5), max_size=5).map(LaurentPoly)
nonzero = polys.filter(lambda p: not p.is_zero())
Q = LaurentPoly.monomial(1)


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == LaurentPoly()


@given(polys, nonzero)
def test_divexact_inverts_multiplication(a, b):
    assert (a * b).divexact(b) == a


@given(polys)
def test_text_and_json_round_trip(a):
    assert LaurentPoly.parse(str(a)) == a
    assert LaurentPoly.from_json(a.to_json()) == a


@given(polys, polys)
def test_bar_is_a_ring_involution(a, b):
    assert (a * b).bar() == a.bar() * b.bar()
    assert a.bar().bar() == a


@given(nonzero, st.integers(-4, 4), st.sampled_from([1, -1]))
def test_unit_witness(a, k, sign):
    ok, witness = equal_up_to_unit(a.shift(k) * sign, a)
    assert ok and witness == (sign, k)
    assert symmetrize(a.shift(k) * sign) == symmetrize(a)


@given(polys, st.integers(0, 3))
def test_exact_divide_by_stabiliser_powers(a, k):
    assert exact_divide(a * STAB ** k, k) == a


def test_not_divisible_raises():
    with pytest.raises(NotDivisible):
        exact_divide(LaurentPoly.const(1), 1)
    with pytest.raises(ZeroDivisionError):
        Q.divexact(0)


def test_quantum_integer_and_units():
    assert LaurentPoly.qint(3) == Q ** 2 + 1 + Q ** -2
    assert Q.is_unit() and (-Q ** -3).is_unit()
    assert not STAB.is_unit()
    assert Q ** -1 * Q == 1


def test_matrix_products_and_inverse():
    m = mat([[Q, 1], [0, Q ** -1]])
    assert det(m) == 1
    inv = inverse_unimodular(m)
    assert m @ inv == LaurentMatrix.identity(2)
    assert inv @ m == LaurentMatrix.identity(2)
    assert (m @ m).T == m.T @ m.T


def test_matrix_block_and_json():
    a = mat([[1, Q]])
    b = LaurentMatrix.identity(2)
    s = LaurentMatrix.direct_sum([a, b])
    assert s.shape == (3, 4)
    assert s[0, 1] == Q and s[2, 3] == 1 and s[0, 2] == 0
    assert LaurentMatrix.from_json(s.to_json()) == s


def test_non_unit_determinant_has_no_inverse():
    with pytest.raises(NotDivisible):
        inverse_unimodular(mat([[STAB]]))
