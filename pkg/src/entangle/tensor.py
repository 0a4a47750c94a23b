"""Dense complex-matrix substrate for bipartite operators.

Operators on H_A (x) H_B are plain ``numpy`` arrays of shape (M*N, M*N) with
the Alice index varying slowest, i.e. ``|a, b>`` sits at row ``a * N + b``.
K-copy operators regroup all Alice copies before all Bob copies, copy index
slower than local index (see :func:`tensor_power`).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_MAX_DIM = 3**6


class DimensionError(ValueError):
    pass


class StateValidationError(ValueError):
    """Raised when a matrix violates a density-matrix invariant.

    ``invariant`` names the violated condition (``"hermitian"``, ``"psd"``,
    ``"trace"``, ``"shape"``).
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


@dataclass(frozen=True)
class ToleranceConfig:
    tol_psd: float = 1e-9
    tol_rank: float = 1e-8
    tol_zero: float = 1e-9

    def __post_init__(self):
        for name in ("tol_psd", "tol_rank", "tol_zero"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


def max_dim() -> int:
    """Dimension cap for K-copy operators; ``ENTANGLE_MAX_DIM`` overrides."""
    value = os.environ.get("ENTANGLE_MAX_DIM")
    return int(value) if value else DEFAULT_MAX_DIM


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = 1.0 + (np.abs(a).max() if a.size else 0.0)
    return bool(np.abs(a - a.conj().T).max(initial=0.0) <= tol * scale)


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Density matrix on a M x N bipartite space.

    Construction validates Hermiticity, positivity (``lambda_min >= -tol_psd``)
    and unit trace; pass ``validate=False`` for intermediate operators that are
    known to be valid up to rounding.
    """

    rho: np.ndarray
    dim_a: int
    dim_b: int
    validate: bool = True
    tol: ToleranceConfig = DEFAULT_TOL

    def __post_init__(self):
        rho = _frozen(self.rho)
        object.__setattr__(self, "rho", rho)
        if self.dim_a < 2 or self.dim_b < 2:
            raise DimensionError("local dimensions must be >= 2")
        d = self.dim_a * self.dim_b
        if rho.shape != (d, d):
            raise StateValidationError(
                "shape", f"matrix is {rho.shape}, expected ({d}, {d}) for dims ({self.dim_a}, {self.dim_b})"
            )
        if self.validate:
            check_density_matrix(rho, self.tol)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @classmethod
    def from_vector(cls, psi: np.ndarray, dim_a: int, dim_b: int) -> "BipartiteState":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dim_a, dim_b)


def check_density_matrix(rho: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> None:
    if not is_hermitian(rho):
        raise StateValidationError("hermitian", "matrix is not Hermitian within 1e-12 relative")
    lam_min = np.linalg.eigvalsh(hermitize(rho))[0]
    if lam_min < -tol.tol_psd:
        raise StateValidationError("psd", f"minimum eigenvalue {lam_min:.3e} below -{tol.tol_psd:g}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-9:
        raise StateValidationError("trace", f"trace {tr:.12g} differs from 1")


def _operator(x, dims: Sequence[int] | None) -> tuple[np.ndarray, tuple[int, int]]:
    if isinstance(x, BipartiteState):
        return np.asarray(x.rho), x.dims
    if dims is None:
        raise DimensionError("dims required for a bare matrix")
    m = np.asarray(x, dtype=complex)
    ma, nb = int(dims[0]), int(dims[1])
    if m.shape != (ma * nb, ma * nb):
        raise DimensionError(f"matrix shape {m.shape} does not match dims ({ma}, {nb})")
    return m, (ma, nb)


def partial_transpose(x, subsystem: str = "A", dims: Sequence[int] | None = None) -> np.ndarray:
    """Transpose the indices of one subsystem.

    ``x`` is a :class:`BipartiteState` or a square array together with ``dims``.
    """
    m, (ma, nb) = _operator(x, dims)
    t = m.reshape(ma, nb, ma, nb)
    if subsystem.upper() == "A":
        t = t.transpose(2, 1, 0, 3)
    elif subsystem.upper() == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return t.reshape(ma * nb, ma * nb)


def partial_trace(x, subsystem: str = "B", dims: Sequence[int] | None = None) -> np.ndarray:
    """Trace out ``subsystem``; ``partial_trace(rho, "B")`` is rho_A."""
    m, (ma, nb) = _operator(x, dims)
    t = m.reshape(ma, nb, ma, nb)
    if subsystem.upper() == "B":
        return np.einsum("ajbj->ab", t)
    if subsystem.upper() == "A":
        return np.einsum("iaib->ab", t)
    raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def regroup_copies(t: np.ndarray, k: int, dim_a: int, dim_b: int) -> np.ndarray:
    """Permute a K-copy operator from (A1 B1)(A2 B2)... order to (A1 A2 ...)(B1 B2 ...)."""
    d = (dim_a * dim_b) ** k
    shape = [dim_a, dim_b] * k
    t = t.reshape(shape + shape)
    row = [2 * c for c in range(k)] + [2 * c + 1 for c in range(k)]
    perm = row + [2 * k + i for i in row]
    return t.transpose(perm).reshape(d, d)


def tensor_power(m: np.ndarray, k: int, factor_dims: Sequence[int], max_dimension: int | None = None) -> np.ndarray:
    """K-fold tensor power of a bipartite operator, regrouped Alice-then-Bob.

    The row index of the result is ``(a_1 ... a_K, b_1 ... b_K)`` read as a
    mixed-radix number, copy 1 most significant on each side. Two copies of a
    3x3 operator: Alice index ``3 * a_1 + a_2``, full index
    ``9 * (3 * a_1 + a_2) + (3 * b_1 + b_2)``.
    """
    if k < 1:
        raise ValueError("K must be >= 1")
    ma, nb = int(factor_dims[0]), int(factor_dims[1])
    m = np.asarray(m, dtype=complex)
    if m.shape != (ma * nb, ma * nb):
        raise DimensionError(f"operator shape {m.shape} does not match dims ({ma}, {nb})")
    cap = max_dim() if max_dimension is None else max_dimension
    if (ma * nb) ** k > cap:
        raise DimensionError(f"(MN)^K = {(ma * nb) ** k} exceeds dimension cap {cap}")
    out = m
    for _ in range(k - 1):
        out = np.kron(out, m)
    return regroup_copies(out, k, ma, nb)


class Kernel(NamedTuple):
    rank: int
    basis: np.ndarray  # columns span the kernel
    projector: np.ndarray


def numerical_kernel(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> Kernel:
    """Rank, kernel basis and kernel projector of a Hermitian matrix.

    Eigenvalues above ``tol_rank * lambda_max`` count towards the rank; the
    remaining eigenvectors span the kernel.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol=max(1e-12, tol.tol_zero)):
        raise ValueError("numerical_kernel requires a Hermitian matrix")
    w, v = np.linalg.eigh(hermitize(m))
    cutoff = tol.tol_rank * max(w[-1], 0.0)
    keep = w > cutoff
    basis = v[:, ~keep]
    return Kernel(int(keep.sum()), basis, basis @ basis.conj().T)


def range_projector(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    return np.eye(m.shape[0]) - numerical_kernel(m, tol).projector


def gell_mann_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian operator basis of d x d matrices, shape (d*d, d, d).

    Element 0 is identity / sqrt(d), followed by the symmetric, antisymmetric
    and diagonal generalized Gell-Mann matrices, all with Tr(O_i O_j) = delta_ij.
    """
    ops = [np.eye(d, dtype=complex) / np.sqrt(d)]
    s = 1 / np.sqrt(2)
    for j in range(d):
        for k in range(j + 1, d):
            o = np.zeros((d, d), dtype=complex)
            o[j, k] = o[k, j] = s
            ops.append(o)
    for j in range(d):
        for k in range(j + 1, d):
            o = np.zeros((d, d), dtype=complex)
            o[j, k] = -1j * s
            o[k, j] = 1j * s
            ops.append(o)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        ops.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return np.array(ops)


def _check_operator_basis(basis: np.ndarray, d: int, tol: float) -> np.ndarray:
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != (d * d, d, d):
        raise DimensionError(f"operator basis has shape {basis.shape}, expected ({d * d}, {d}, {d})")
    gram = np.einsum("iab,jba->ij", basis, basis)
    if np.abs(gram - np.eye(d * d)).max() > tol:
        raise ValueError("operator basis is not orthonormal under the trace inner product")
    if np.abs(basis - basis.conj().transpose(0, 2, 1)).max() > tol:
        raise ValueError("operator basis is not Hermitian")
    first = basis[0]
    if np.abs(first - first[0, 0] * np.eye(d)).max() > tol:
        raise ValueError("first basis element must be proportional to the identity")
    return basis


def realign_to_correlation(x, basis="gell-mann", dims: Sequence[int] | None = None,
                           tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Coefficients rho_ij = Tr(rho O_i^A (x) O_j^B), a real M^2 x N^2 matrix.

    ``basis`` is ``"gell-mann"`` or a pair ``(basis_a, basis_b)`` of stacked
    operator bases. Works on any Hermitian operator, not only states.
    """
    m, (ma, nb) = _operator(x, dims)
    basis_a, basis_b = operator_bases(ma, nb, basis, tol)
    t = m.reshape(ma, nb, ma, nb)
    coef = np.einsum("abcd,ica,jdb->ij", t, basis_a, basis_b)
    return coef.real


def operator_bases(ma: int, nb: int, basis="gell-mann", tol: ToleranceConfig = DEFAULT_TOL):
    if isinstance(basis, str):
        if basis != "gell-mann":
            raise ValueError(f"unknown operator basis {basis!r}")
        return gell_mann_basis(ma), gell_mann_basis(nb)
    basis_a, basis_b = basis
    return _check_operator_basis(basis_a, ma, tol.tol_zero), _check_operator_basis(basis_b, nb, tol.tol_zero)


def reconstruct_from_correlation(coef: np.ndarray, basis_a: np.ndarray, basis_b: np.ndarray) -> np.ndarray:
    ma, nb = basis_a.shape[1], basis_b.shape[1]
    t = np.einsum("ij,iac,jbd->abcd", coef, basis_a, basis_b)
    return t.reshape(ma * nb, ma * nb)


def min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(np.asarray(m)))[0])


def max_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(np.asarray(m)))[-1])
