import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from entangle.two_copy_family import (
    FAMILY_M,
    family_components,
    hessian_check,
    family_objective,
    family_operator,
    det26,
    perturbed_psi_star,
    psi_star,
    swap_copies,
)
from entangle.distill import random_schmidt_vectors
from entangle.states import max_entangled_projector
from entangle.tensor import tensor_power


def _components_by_index_sums(vec):
    # psi[a1, a2, b1, b2]; P acts on (a_c, b_c) of one copy
    t = vec.reshape(3, 3, 3, 3)
    p_one = np.sum(np.abs(np.einsum("ixiy->xy", t)) ** 2) / 3
    one_p = np.sum(np.abs(np.einsum("xiyi->xy", t)) ** 2) / 3
    p_p = abs(np.einsum("ijij->", t)) ** 2 / 9
    return {"1x1": np.vdot(vec, vec).real, "1xP": one_p, "Px1": p_one, "PxP": p_p}


@given(st.integers(0, 10**6))
def test_components_match_index_sums(seed):
    vec = random_schmidt_vectors(1, 9, 9, seed=seed)[0]
    got = family_components(vec)
    want = _components_by_index_sums(vec)
    for key in want:
        assert got[key] == pytest.approx(want[key], abs=1e-12)


def test_psi_star_components():
    c = family_components(psi_star())
    assert_allclose([c["1x1"], c["1xP"], c["Px1"], c["PxP"]], [1, 0, 2 / 3, 0], atol=1e-15)


def test_half_operator_is_two_copy_power():
    op = np.eye(9) - 1.5 * max_entangled_projector(3)
    assert_allclose(family_operator(0.5), tensor_power(op, 2, (3, 3)) / FAMILY_M**2, atol=1e-14)


@pytest.mark.parametrize("lam", [0.0, 0.1, 0.25, 0.5])
def test_zero_line(lam):
    assert abs(family_objective(lam, psi_star())) < 1e-12


@pytest.mark.parametrize("i,j,r,s", [(0, 1, 0, 1), (2, 0, 1, 2), (1, 2, 2, 0)])
def test_zero_line_any_labels(i, j, r, s):
    assert abs(family_objective(0.3, psi_star(i, j, r, s))) < 1e-12
    assert np.linalg.norm(psi_star(i, j, r, s).vector) == pytest.approx(1.0)


@pytest.mark.parametrize("lam,phi", list(itertools.product([0.1, 0.4], [0.3, 1.0, np.pi])))
def test_relative_phase_dependence(lam, phi):
    # the phase enters only through <P (x) 1> = (1 + cos phi) / 3
    want = (1 - lam) * (1 - np.cos(phi)) / FAMILY_M**2
    assert family_objective(lam, psi_star(phi=phi)) == pytest.approx(want, abs=1e-14)


@given(st.integers(0, 10**6), st.floats(0.0, 1.0))
def test_copy_swap_mirrors_lambda(seed, lam):
    vec = random_schmidt_vectors(1, 9, 9, seed=seed)[0]
    assert family_objective(lam, swap_copies(vec)) == pytest.approx(family_objective(1 - lam, vec), abs=1e-12)


def test_psi_star_rejects_collisions():
    with pytest.raises(ValueError):
        psi_star(0, 0, 1, 2)
    with pytest.raises(ValueError):
        psi_star(0, 1, 3, 2)
    with pytest.raises(ValueError):
        family_objective(1.5, psi_star())


def test_perturbation_vanishes_at_origin():
    assert_allclose(perturbed_psi_star(np.zeros(7)), psi_star().vector, atol=1e-15)


def test_quarter_lambda_first_coefficient():
    rep = hessian_check(0.25)
    assert rep.hessian[0, 0] == pytest.approx(0.75, abs=1e-4)


@pytest.mark.parametrize("lam", [0.1, 0.3, 0.5])
def test_hessian_closed_forms(lam):
    rep = hessian_check(lam)
    assert rep.max_gradient < 1e-6
    assert rep.diag_error < 1e-4
    assert rep.offdiag_error < 1e-4
    assert rep.spurious_offdiag < 1e-4
    assert rep.det26_numeric == pytest.approx(rep.det26_formula, abs=1e-4)


@pytest.mark.parametrize("lam", [0.1, 0.5])
def test_hessian_diagonal_when_t_equals_s(lam):
    rep = hessian_check(lam, t_equals_s=True)
    assert rep.diag_error < 1e-4
    assert rep.max_gradient < 1e-6


def test_det26_nonnegative_on_range():
    lam = np.linspace(1e-6, 0.5, 101)
    assert np.all(det26(lam) >= -1e-12)
    assert abs(det26(0.5)) < 1e-12


def test_hessian_check_rejects_upper_half():
    with pytest.raises(ValueError):
        hessian_check(0.7)
    with pytest.raises(ValueError):
        hessian_check(0.0)
