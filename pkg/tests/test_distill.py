import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from entangle.distill import (
    SchmidtPair,
    beta_k_bound,
    certificate_operators,
    kcopy_objective,
    kcopy_objective_dense,
    minimize_kdistill,
    random_schmidt_vectors,
    two_copy_certificate,
    werner_1copy_min,
    werner_kdistill,
    werner_scan,
)
from entangle.two_copy_family import psi_bullet, psi_star
from entangle.states import werner_pt
from entangle.tensor import DimensionError, hermitize


def _random_op(d, seed):
    rng = np.random.default_rng(seed)
    return hermitize(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))


def test_identity_objective_is_one():
    psi = SchmidtPair.from_vector(random_schmidt_vectors(1, 3, 3, seed=0)[0], 3, 3)
    assert kcopy_objective(np.eye(9), 1, psi) == pytest.approx(1.0)


def test_max_overlap_pair_gives_closed_form():
    e = np.eye(3)
    psi = SchmidtPair(1 / np.sqrt(2), 1 / np.sqrt(2), e[0], e[1], e[0], e[1])
    for beta in (0.0, 1.0, 1.5, 2.0):
        assert kcopy_objective(werner_pt(3, beta, normalize=False), 1, psi) == pytest.approx(1 - 2 * beta / 3)


@given(st.integers(0, 10**6), st.sampled_from([(1, 3, 3), (2, 2, 2), (2, 3, 2), (3, 2, 2)]))
def test_copywise_and_dense_paths_agree(seed, case):
    k, m, n = case
    op = _random_op(m * n, seed)
    vec = random_schmidt_vectors(1, m**k, n**k, seed=seed)[0]
    assert kcopy_objective(op, k, vec, (m, n)) == pytest.approx(kcopy_objective_dense(op, k, vec, (m, n)), abs=1e-12)


def test_schmidt_pair_roundtrip_and_validation():
    vec = random_schmidt_vectors(1, 9, 9, seed=3)[0]
    pair = SchmidtPair.from_vector(vec, 9, 9)
    overlap = abs(np.vdot(pair.vector, vec))
    assert overlap == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        SchmidtPair.from_vector(np.eye(3).ravel(), 3, 3)
    e = np.eye(2)
    with pytest.raises(ValueError):
        SchmidtPair(1.0, 1.0, e[0], e[1], e[0], e[1])
    with pytest.raises(ValueError):
        SchmidtPair(1.0, 0.0, e[0], e[0], e[0], e[1])


@pytest.mark.parametrize("beta", [0, 0.5, 1, 1.25, 1.5, 2, 3])
def test_one_copy_matches_closed_form(beta):
    p = werner_kdistill(3, beta, 1, restarts=16)
    assert p.min_value == pytest.approx(werner_1copy_min(3, beta), abs=1e-6)


def test_minimizer_reproduces_min_value():
    op = werner_pt(3, 2.0, normalize=False)
    p = minimize_kdistill(op, 1, restarts=8)
    assert kcopy_objective(op, 1, p.minimizer) == pytest.approx(p.min_value, abs=1e-9)
    assert p.distillable


def test_one_copy_monotone_in_beta():
    vals = [werner_kdistill(3, b, 1, restarts=8).min_value for b in np.linspace(0, 3, 7)]
    assert np.all(np.diff(vals) <= 1e-9)


def test_optimizer_beats_every_grid_point():
    # N = 2, K = 2: coarse grid of Schmidt pairs built from computational basis vectors
    op = _random_op(4, 11)
    best = minimize_kdistill(op, 2, restarts=32, factor_dims=(2, 2)).min_value
    basis = np.eye(4)
    grid = []
    for (i1, i2), (j1, j2) in itertools.product(itertools.permutations(range(4), 2), repeat=2):
        for theta in np.linspace(0, np.pi / 2, 7):
            vec = np.cos(theta) * np.kron(basis[i1], basis[j1]) + np.sin(theta) * np.kron(basis[i2], basis[j2])
            grid.append(kcopy_objective(op, 2, vec, (2, 2)))
    assert best <= min(grid) + 1e-9


def test_two_copy_finds_negative_value_above_threshold():
    p = werner_kdistill(3, 1.6, 2, restarts=16)
    assert p.min_value < -1e-6


def test_seeded_determinism():
    a = werner_kdistill(3, 1.4, 1, restarts=8, seed=5)
    b = werner_kdistill(3, 1.4, 1, restarts=8, seed=5)
    assert a.min_value == b.min_value


def test_dimension_cap():
    with pytest.raises(DimensionError):
        werner_kdistill(3, 1.2, 4, restarts=1)


def test_one_copy_min_formula():
    assert werner_1copy_min(3, 0.0) == 1.0
    assert werner_1copy_min(3, 1.5) == pytest.approx(0.0)
    assert werner_1copy_min(3, -1.0) == 1.0


def test_beta_k_bound():
    assert beta_k_bound(1) == pytest.approx(1 + 3 ** (-1 / 3))
    assert beta_k_bound(3) == pytest.approx(1.2311, abs=1e-4)
    vals = [beta_k_bound(k) for k in range(1, 30)]
    assert np.all(np.diff(vals) < 0) and vals[-1] > 1
    with pytest.raises(ValueError):
        beta_k_bound(0)


def test_gap_operator_is_average_of_chain():
    ops = certificate_operators()
    assert_allclose(ops["gap"], 0.5 * (ops["chain_left"] + ops["chain_right"]), atol=1e-13)


def test_psi_star_saturates_intermediate_inequalities():
    ops = certificate_operators()
    v, w = psi_star().vector, psi_bullet()
    assert np.vdot(v, ops["chain_right"] @ v).real == pytest.approx(0.0, abs=1e-14)
    assert np.vdot(w, ops["chain_left"] @ w).real == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("beta,status", [(0.8, "ppt"), (1.2, "not_2_distillable_certified"), (1.3, "inconclusive")])
def test_certificate_status(beta, status):
    rep = two_copy_certificate(beta, samples=500, seed=1, extra=psi_star().vector)
    assert rep.status == status
    assert rep.min_gap >= -1e-10


def _two_copy_candidate():
    # (|00> + |11>)/sqrt(2) on copy one times |00> on copy two; Alice index 3 a1 + a2
    v = np.zeros((9, 9))
    v[0, 0] = v[3, 3] = 1 / np.sqrt(2)
    return v.ravel()


@pytest.mark.parametrize("beta", [1.1, 1.3, 1.45])
def test_two_copy_candidate_value(beta):
    # (1 - 2 beta / 3) from copy one times (1 - beta / 3) from copy two
    op = werner_pt(3, beta, normalize=False)
    assert kcopy_objective(op, 2, _two_copy_candidate()) == pytest.approx(1 - beta + 2 * beta**2 / 9, abs=1e-14)


def test_warm_scan_reaches_two_copy_candidate():
    betas = [1.3, 1.4, 1.49]
    points = werner_scan(3, betas, 2, restarts=24, seed=0)
    for b, p in zip(betas, points):
        assert p.min_value <= 1 - b + 2 * b**2 / 9 + 1e-9
        assert p.min_value >= -1e-9


def test_explicit_start_is_respected():
    op = werner_pt(3, 1.49, normalize=False)
    p = minimize_kdistill(op, 2, restarts=1, starts=[_two_copy_candidate()], hops=0)
    assert p.min_value <= 1 - 1.49 + 2 * 1.49**2 / 9 + 1e-12
    assert p.restarts == 2
