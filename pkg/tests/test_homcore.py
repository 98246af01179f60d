"""F_2 homology, cones and type DA structure checks."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tanglefloer.algebra import build_algebra
from tanglefloer.ctmod import bimodule_dims, build_ct
from tanglefloer.homcore import (
    BigradedComplex,
    DABimodule,
    MiddleMismatch,
    NotAComplex,
    NotChainMap,
    box_tensor,
    check_structure,
    cone,
    dims_euler,
    homology,
    identity_bimodule,
    rank_f2,
)
from tanglefloer.tanglelang import crossing


def test_rank_f2():
    assert rank_f2([0b011, 0b110, 0b101]) == 2
    assert rank_f2([]) == 0
    assert rank_f2([0b1, 0b10, 0b100]) == 3


def test_homology_of_an_interval():
    # a -> b with a in degree 1 is acyclic; adding a lone c leaves c
    c = BigradedComplex([(1, 0), (0, 0), (0, 2)], [0b010, 0, 0])
    assert homology(c) == {(0, 2): 1}
    assert dims_euler(homology(c)) == c.euler()


def test_bad_complexes_are_rejected():
    with pytest.raises(NotAComplex):
        homology(BigradedComplex([(1, 0), (0, 2)], [0b10, 0]))
    with pytest.raises(NotAComplex):
        homology(BigradedComplex([(2, 0), (1, 0), (0, 0)], [0b010, 0b100, 0]))


@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=6))
def test_cone_of_identity_is_acyclic(gradings):
    c = BigradedComplex(gradings, [0] * len(gradings))
    assert homology(cone(c, c, [1 << i for i in range(len(c))])) == {}


def test_cone_rejects_non_chain_maps():
    c = BigradedComplex([(1, 0), (0, 0)], [0b10, 0])
    with pytest.raises(NotChainMap):
        cone(c, c, [0b01, 0])


def test_crossing_bimodule_satisfies_structure_equations():
    assert check_structure(build_ct(crossing("xe", 1, (1, -1)))) is None


def test_single_term_mutations_are_mostly_detected():
    m = build_ct(crossing("xe", 1, (1, -1)))
    missed, total = [], 0
    for x in range(len(m)):
        for term in sorted(m.delta1[x]):
            total += 1
            d1 = list(m.delta1)
            d1[x] = d1[x] - {term}
            mutant = DABimodule(
                m.left, m.right, m.gens, m.gradings, m.left_idem, m.right_idem, d1, m.delta2,
                action=m.action, action_classes=m.action_classes,
            )
            if check_structure(mutant) is None:
                missed.append(term)
    assert total == 152
    # only differential terms with idempotent coefficients can slip through
    assert len(missed) == 2
    assert all(m.left.is_idem[a] for a, _ in missed)


def test_identity_bimodule_is_a_unit_for_box_tensor():
    t = crossing("xo", 1, (-1, 1))
    m = build_ct(t)
    ident = identity_bimodule(build_algebra(t.out_signs))
    assert check_structure(ident) is None
    assert bimodule_dims(box_tensor(m, ident)) == bimodule_dims(m)


def test_box_tensor_checks_middle_algebra():
    m = build_ct(crossing("xe", 1, (1, -1)))
    with pytest.raises(MiddleMismatch):
        box_tensor(m, m)
