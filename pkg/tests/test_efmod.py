"""The E and F bimodules over the strand algebra."""

from itertools import product

import pytest

from tanglefloer import efmod, reference, uqgl11
from tanglefloer.k0 import piece_matrix
from tanglefloer.laurent import STAB
from tanglefloer.tanglelang import elementary_tangles

SMALL = [p for n in range(3) for p in product((1, -1), repeat=n)]


@pytest.mark.parametrize("p", SMALL)
@pytest.mark.parametrize("side", ["E", "F"])
def test_bimodule_structure(p, side):
    assert efmod.build(p, side).check() is None


@pytest.mark.parametrize("p", SMALL)
def test_class_matrices_equal_quantum_action(p):
    e, f = uqgl11.ef_matrices(p)
    assert efmod.class_matrix(p, "E") == e
    assert efmod.class_matrix(p, "F") == f


@pytest.mark.parametrize("p", SMALL)
def test_displayed_matrices(p):
    stab = STAB ** len(p)
    assert efmod.displayed_matrix(p, "F") == reference.F_MATRICES[p] * stab
    assert efmod.displayed_matrix(p, "E") == reference.e_matrix(len(p)) * stab


@pytest.mark.parametrize("p", SMALL)
def test_class_matrix_counts_filtration_generators(p):
    assert efmod.class_matrix(p, "F") == efmod.y_generator_matrix(p)


@pytest.mark.parametrize("p", SMALL)
def test_reflected_gradings_match_direct_formula(p):
    assert efmod.build(p, "E").gradings == efmod.direct_E_gradings(p)


@pytest.mark.parametrize("p", SMALL)
def test_squares_are_acyclic(p):
    assert efmod.acyclic_squares(p) == {"FF": {}, "EE": {}}


@pytest.mark.parametrize("p", SMALL + [(1, -1, 1)])
def test_exact_triangle(p):
    tri = efmod.triangle_check(p)
    assert tri["chi_identity"] and tri["basis_matches"]


@pytest.mark.parametrize("p", SMALL)
def test_cancellation_projectivity_and_filtration(p):
    assert efmod.cancellation_matching(p)
    assert efmod.projective_check(p) == {"acyclic": True, "isomorphic": True}
    assert efmod.filtration_check(p)


def test_lowering_generator_count():
    # partial bijections of {-1, 0, .., n} into [n] with -1 in the domain
    for n in range(3):
        gens = efmod.lowering_generators(n)
        assert all(any(a == -1 for a, _ in g) for g in gens)
        assert len(set(gens)) == len(gens)


@pytest.mark.parametrize("t", elementary_tangles(2), ids=lambda t: f"{t.token()} {t.in_signs}")
def test_tangle_matrices_commute_with_e_and_f(t):
    k = piece_matrix(t)
    assert efmod.commutes_with(k, t.in_signs, t.out_signs, "E")
    assert efmod.commutes_with(k, t.in_signs, t.out_signs, "F")
