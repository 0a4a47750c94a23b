import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from entangle.states import flip_operator, max_entangled_projector, random_density_matrix, random_state
from entangle.tensor import (
    BipartiteState,
    DimensionError,
    StateValidationError,
    gell_mann_basis,
    numerical_kernel,
    operator_bases,
    partial_trace,
    partial_transpose,
    realign_to_correlation,
    reconstruct_from_correlation,
    regroup_copies,
    tensor_power,
)

dims_st = st.tuples(st.integers(2, 4), st.integers(2, 4))


def _random_matrix(d, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def _pt_a_loops(m, ma, nb):
    out = np.zeros_like(m)
    for a in range(ma):
        for b in range(nb):
            for c in range(ma):
                for d in range(nb):
                    out[c * nb + b, a * nb + d] = m[a * nb + b, c * nb + d]
    return out


def _trace_b_loops(m, ma, nb):
    out = np.zeros((ma, ma), dtype=complex)
    for a in range(ma):
        for c in range(ma):
            out[a, c] = sum(m[a * nb + j, c * nb + j] for j in range(nb))
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
def test_flip_partial_transpose_is_n_times_max_entangled_projector(n):
    assert_allclose(partial_transpose(flip_operator(n), "A", (n, n)), n * max_entangled_projector(n), atol=1e-14)


@pytest.mark.parametrize("ma,nb", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_partial_transpose_matches_index_loops(ma, nb):
    m = _random_matrix(ma * nb, 7)
    assert_allclose(partial_transpose(m, "A", (ma, nb)), _pt_a_loops(m, ma, nb), atol=1e-14)
    # transposing B is the full transpose of transposing A
    assert_allclose(partial_transpose(m, "B", (ma, nb)), _pt_a_loops(m, ma, nb).T, atol=1e-14)


@pytest.mark.parametrize("ma,nb", [(2, 3), (3, 3), (4, 2)])
def test_partial_trace_matches_direct_sum(ma, nb):
    m = _random_matrix(ma * nb, 3)
    assert_allclose(partial_trace(m, "B", (ma, nb)), _trace_b_loops(m, ma, nb), atol=1e-13)
    swap = np.arange(ma * nb).reshape(ma, nb).T.ravel()
    assert_allclose(partial_trace(m, "A", (ma, nb)), _trace_b_loops(m[np.ix_(swap, swap)], nb, ma), atol=1e-13)


def test_partial_trace_of_product():
    ra, rb = random_density_matrix(2, seed=1), random_density_matrix(3, seed=2)
    rho = np.kron(ra, rb)
    assert_allclose(partial_trace(rho, "B", (2, 3)), ra, atol=1e-14)
    assert_allclose(partial_trace(rho, "A", (2, 3)), rb, atol=1e-14)


@given(dims_st, st.integers(0, 2**32 - 1))
def test_partial_transpose_involution_and_spectrum(dims, seed):
    s = random_state(*dims, seed=seed)
    pt_a = partial_transpose(s, "A")
    assert_allclose(partial_transpose(pt_a, "A", dims), s.rho, atol=1e-14)
    assert_allclose(np.linalg.eigvalsh(pt_a), np.linalg.eigvalsh(partial_transpose(s, "B")), atol=1e-12)
    assert abs(np.trace(pt_a) - 1) < 1e-12


def test_partial_transpose_rejects_bad_input():
    with pytest.raises(DimensionError):
        partial_transpose(np.eye(6), "A", (2, 2))
    with pytest.raises(DimensionError):
        partial_transpose(np.eye(4))
    with pytest.raises(ValueError):
        partial_transpose(np.eye(4), "C", (2, 2))


def test_tensor_power_of_product_operator():
    a, b = _random_matrix(2, 1), _random_matrix(3, 2)
    assert_allclose(tensor_power(np.kron(a, b), 2, (2, 3)), np.kron(np.kron(a, a), np.kron(b, b)), atol=1e-12)
    assert_allclose(tensor_power(np.kron(a, b), 1, (2, 3)), np.kron(a, b))


def test_tensor_power_index_layout():
    # entry <a1 a2, b1 b2| X^(x)2 |c1 c2, d1 d2> = X[a1 b1, c1 d1] X[a2 b2, c2 d2]
    x = _random_matrix(9, 4)
    big = tensor_power(x, 2, (3, 3))
    a1, a2, b1, b2, c1, c2, d1, d2 = 2, 0, 1, 2, 0, 1, 2, 2
    row = 9 * (3 * a1 + a2) + 3 * b1 + b2
    col = 9 * (3 * c1 + c2) + 3 * d1 + d2
    assert np.isclose(big[row, col], x[3 * a1 + b1, 3 * c1 + d1] * x[3 * a2 + b2, 3 * c2 + d2])


@pytest.mark.parametrize("k", [2, 3])
def test_trace_of_tensor_power(k):
    x = _random_matrix(4, k)
    assert np.isclose(np.trace(tensor_power(x, k, (2, 2))), np.trace(x) ** k)


def test_tensor_power_at_lambda_half():
    p = max_entangled_projector(3)
    op = np.eye(9) - 1.5 * p
    big = tensor_power(op, 2, (3, 3))
    one = np.eye(9)
    pp = regroup_copies(np.kron(p, p), 2, 3, 3)
    p1 = regroup_copies(np.kron(p, one), 2, 3, 3)
    p2 = regroup_copies(np.kron(one, p), 2, 3, 3)
    assert_allclose(big, np.eye(81) - 1.5 * (p1 + p2) + 2.25 * pp, atol=1e-13)


def test_dimension_cap(monkeypatch):
    with pytest.raises(DimensionError):
        tensor_power(np.eye(9), 4, (3, 3))
    with pytest.raises(DimensionError):
        tensor_power(np.eye(4), 3, (2, 2), max_dimension=32)
    monkeypatch.setenv("ENTANGLE_MAX_DIM", "16")
    with pytest.raises(DimensionError):
        tensor_power(np.eye(9), 2, (3, 3))


def test_numerical_kernel_of_projector():
    p = max_entangled_projector(3)
    ker = numerical_kernel(p)
    assert ker.rank == 1
    assert ker.basis.shape == (9, 8)
    assert_allclose(ker.projector, np.eye(9) - p, atol=1e-12)
    with pytest.raises(ValueError):
        numerical_kernel(np.triu(np.ones((3, 3))))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_gell_mann_basis_orthonormal_hermitian(d):
    b = gell_mann_basis(d)
    assert_allclose(np.einsum("iab,jba->ij", b, b), np.eye(d * d), atol=1e-14)
    assert_allclose(b, b.conj().transpose(0, 2, 1), atol=0)
    assert_allclose(b[0], np.eye(d) / np.sqrt(d))


@given(dims_st, st.integers(0, 2**32 - 1))
def test_realignment_roundtrip(dims, seed):
    s = random_state(*dims, seed=seed)
    coef = realign_to_correlation(s)
    ba, bb = operator_bases(*dims)
    assert coef.shape == (dims[0] ** 2, dims[1] ** 2)
    assert_allclose(reconstruct_from_correlation(coef, ba, bb), s.rho, atol=1e-12)


def test_realignment_product_has_rank_one():
    rho = np.kron(random_density_matrix(2, seed=0), random_density_matrix(3, seed=1))
    sv = np.linalg.svd(realign_to_correlation(rho, dims=(2, 3)), compute_uv=False)
    assert sv[1] < 1e-12 * sv[0]


def test_realignment_rejects_non_orthonormal_basis():
    ba = gell_mann_basis(2) * 1.1
    with pytest.raises(ValueError):
        realign_to_correlation(np.eye(4) / 4, basis=(ba, gell_mann_basis(2)), dims=(2, 2))


def test_state_validation_names_invariant():
    cases = {
        "hermitian": np.array([[0.5, 0.1, 0, 0], [0, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]),
        "psd": np.diag([0.6, 0.6, -0.2, 0.0]),
        "trace": np.eye(4) / 2,
    }
    for name, m in cases.items():
        with pytest.raises(StateValidationError) as err:
            BipartiteState(m, 2, 2)
        assert err.value.invariant == name
    with pytest.raises(StateValidationError) as err:
        BipartiteState(np.eye(6) / 6, 2, 2)
    assert err.value.invariant == "shape"
    with pytest.raises(DimensionError):
        BipartiteState(np.eye(3) / 3, 1, 3)


def test_state_is_immutable():
    s = BipartiteState(np.eye(4) / 4, 2, 2)
    with pytest.raises(ValueError):
        s.rho[0, 0] = 1.0
