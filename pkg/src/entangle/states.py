"""Constructors for the state families used throughout the package."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import BipartiteState, DimensionError, DEFAULT_TOL


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


@dataclass(frozen=True)
class WernerParams:
    """Werner family rho ~ P_S + alpha P_A on N x N.

    ``beta = N (alpha - 1) / (alpha + 1)`` parametrizes the partial transpose
    ``(1 - beta P) / (N^2 - beta)``; alpha >= 0 maps onto -N <= beta < N.
    """

    n: int
    alpha: float

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError("Werner family needs N >= 2")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def beta(self) -> float:
        return self.n * (self.alpha - 1.0) / (self.alpha + 1.0)

    @classmethod
    def from_beta(cls, n: int, beta: float) -> "WernerParams":
        if not -n <= beta < n:
            raise ValueError(f"beta must lie in [-N, N) for finite alpha, got {beta}")
        return cls(n, (n + beta) / (n - beta))


def flip_operator(n: int) -> np.ndarray:
    """V = sum_ij |ij><ji| on n x n."""
    v = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            v[i, j, j, i] = 1.0
    return v.reshape(n * n, n * n)


def max_entangled(m: int) -> np.ndarray:
    """|Psi_max> = sum_i |ii> / sqrt(m)."""
    if m < 2:
        raise DimensionError("m must be >= 2")
    psi = np.zeros(m * m, dtype=complex)
    psi[:: m + 1] = 1.0 / np.sqrt(m)
    return psi


def max_entangled_projector(m: int) -> np.ndarray:
    psi = max_entangled(m)
    return np.outer(psi, psi.conj())


def werner_normalization(n: int, alpha: float) -> float:
    """m(alpha) = dim P_S + alpha dim P_A."""
    return n * (n + 1) / 2 + alpha * n * (n - 1) / 2


def werner_state(params: WernerParams) -> BipartiteState:
    n = params.n
    v = flip_operator(n)
    one = np.eye(n * n)
    p_sym, p_anti = (one + v) / 2, (one - v) / 2
    rho = (p_sym + params.alpha * p_anti) / werner_normalization(n, params.alpha)
    return BipartiteState(rho, n, n)


def werner_pt(n: int, beta: float, normalize: bool = True) -> np.ndarray:
    """(1 - beta P) / n(beta) with n(beta) = N^2 - beta.

    With ``normalize=False`` the bare operator 1 - beta P is returned; the
    distillability objectives are quoted in that convention.
    """
    if n < 2:
        raise DimensionError("N must be >= 2")
    if not -n <= beta <= n:
        raise ValueError(f"beta must lie in [-N, N], got {beta}")
    op = np.eye(n * n) - beta * max_entangled_projector(n)
    if not normalize:
        return op
    norm = n * n - beta
    if norm <= 0:
        raise ValueError(f"normalization n(beta) = {norm} is not positive")
    return op / norm


@dataclass(frozen=True, eq=False)
class ProductVector:
    e: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        e = np.array(self.e, dtype=complex).ravel()
        f = np.array(self.f, dtype=complex).ravel()
        for name, x in (("e", e), ("f", f)):
            if abs(np.linalg.norm(x) - 1.0) > DEFAULT_TOL.tol_zero:
                raise ValueError(f"local vector {name} is not normalized (norm {np.linalg.norm(x):.12g})")
            x.setflags(write=False)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "f", f)

    @classmethod
    def normalized(cls, e, f) -> "ProductVector":
        e = np.asarray(e, dtype=complex).ravel()
        f = np.asarray(f, dtype=complex).ravel()
        return cls(e / np.linalg.norm(e), f / np.linalg.norm(f))

    @property
    def dims(self) -> tuple[int, int]:
        return (self.e.size, self.f.size)

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.e, self.f)

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())

    def conj_a(self) -> "ProductVector":
        """|e*, f>, the image of |e, f> under partial transposition on A."""
        return ProductVector(self.e.conj(), self.f)


def tiles_upb_vectors() -> list[ProductVector]:
    """The five product vectors of the 3x3 "tiles" unextendible product basis."""
    s2 = 1 / np.sqrt(2)
    k = np.eye(3)
    uniform = np.ones(3) / np.sqrt(3)
    return [
        ProductVector(k[0], s2 * (k[0] - k[1])),
        ProductVector(s2 * (k[0] - k[1]), k[2]),
        ProductVector(k[2], s2 * (k[1] - k[2])),
        ProductVector(s2 * (k[1] - k[2]), k[0]),
        ProductVector(uniform, uniform),
    ]


def tiles_upb_state() -> BipartiteState:
    """(1 - sum of the five tiles projectors) / 4, a rank-4 PPT entangled state."""
    proj = sum(pv.projector() for pv in tiles_upb_vectors())
    return BipartiteState((np.eye(9) - proj) / 4, 3, 3)


def haar_unitary(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_unit_vector(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_state(m: int, n: int, rank: int | None = None, seed=None) -> BipartiteState:
    """G G^dag / Tr(G G^dag) with G a complex Gaussian (mn x rank) matrix."""
    d = m * n
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}]")
    rng = _rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return BipartiteState(rho / np.trace(rho).real, m, n)


def random_density_matrix(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    rank = d if rank is None else rank
    rng = _rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_product_vector(m: int, n: int, seed=None) -> ProductVector:
    rng = _rng(seed)
    return ProductVector(random_unit_vector(m, rng), random_unit_vector(n, rng))


def random_separable_state(m: int, n: int, terms: int, seed=None) -> tuple[BipartiteState, np.ndarray, list[ProductVector]]:
    """Random convex mixture of ``terms`` pure product states.

    Returns the state together with its weights and product vectors so callers
    hold an explicit separable decomposition.
    """
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    vectors = [random_product_vector(m, n, rng) for _ in range(terms)]
    rho = sum(w * pv.projector() for w, pv in zip(weights, vectors))
    return BipartiteState(rho, m, n), weights, vectors


def product_state(rho_a: np.ndarray, rho_b: np.ndarray) -> BipartiteState:
    return BipartiteState(np.kron(rho_a, rho_b), rho_a.shape[0], rho_b.shape[0])


def maximally_mixed(m: int, n: int) -> BipartiteState:
    return BipartiteState(np.eye(m * n) / (m * n), m, n)
