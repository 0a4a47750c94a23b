"""K-copy distillability of Werner-type states.

A state is K-distillable iff <psi|(rho^TA)^{(x)K}|psi> < 0 for some psi of
Schmidt rank <= 2 across the (Alice copies) | (Bob copies) cut. Objectives
are quoted for the bare operator 1 - beta P unless stated otherwise; dividing
by n(beta)^K = (N^2 - beta)^K never changes a sign.

Schmidt pairs are stored with Alice vectors conjugated,
psi = a |e1*>|f1> + b |e2*>|f2>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .states import max_entangled_projector, werner_pt
from .tensor import DEFAULT_TOL, DimensionError, hermitize, max_dim, regroup_copies, tensor_power

DEFAULT_RESTARTS = {1: 32, 2: 256, 3: 64}


@dataclass(frozen=True, eq=False)
class SchmidtPair:
    a: complex
    b: complex
    e1: np.ndarray
    e2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray

    def __post_init__(self):
        tol = DEFAULT_TOL.tol_zero
        if abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1) > tol:
            raise ValueError("|a|^2 + |b|^2 must equal 1")
        for x, y in ((self.e1, self.e2), (self.f1, self.f2)):
            if abs(np.vdot(x, y)) > tol:
                raise ValueError("Schmidt frames must be orthogonal")
            if abs(np.linalg.norm(x) - 1) > tol or abs(np.linalg.norm(y) - 1) > tol:
                raise ValueError("Schmidt frame vectors must be normalized")

    @property
    def dims(self) -> tuple[int, int]:
        return (self.e1.size, self.f1.size)

    @property
    def vector(self) -> np.ndarray:
        return self.a * np.kron(self.e1.conj(), self.f1) + self.b * np.kron(self.e2.conj(), self.f2)

    @classmethod
    def from_vector(cls, psi: np.ndarray, dim_a: int, dim_b: int, tol: float = 1e-8) -> "SchmidtPair":
        """Schmidt pair of a vector with Schmidt rank <= 2 (normalized on the way)."""
        mat = np.asarray(psi, dtype=complex).reshape(dim_a, dim_b)
        mat = mat / np.linalg.norm(mat)
        u, s, vh = np.linalg.svd(mat)
        if s.size > 2 and s[2] > tol:
            raise ValueError(f"vector has Schmidt rank > 2 (third coefficient {s[2]:.3e})")
        a, b = s[0], s[1]
        norm = np.hypot(a, b)
        return cls(a / norm, b / norm, u[:, 0].conj(), u[:, 1].conj(), vh[0], vh[1])


@dataclass(frozen=True, eq=False)
class DistillScanPoint:
    beta: float | None
    k: int
    min_value: float
    minimizer: SchmidtPair
    restarts: int
    converged_fraction: float
    seed: object = None

    @property
    def distillable(self) -> bool:
        return self.min_value < -DEFAULT_TOL.tol_zero

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "K": self.k,
            "min_value": float(self.min_value),
            "distillable": bool(self.distillable),
            "restarts": int(self.restarts),
            "converged_fraction": float(self.converged_fraction),
        }


def _factor_dims(op: np.ndarray, factor_dims: Sequence[int] | None) -> tuple[int, int]:
    if factor_dims is not None:
        return int(factor_dims[0]), int(factor_dims[1])
    n = int(round(np.sqrt(op.shape[0])))
    if n * n != op.shape[0]:
        raise DimensionError("pass factor_dims for a non-square bipartition")
    return n, n


def kcopy_objective(op_pt: np.ndarray, k: int, psi, factor_dims: Sequence[int] | None = None) -> float:
    """<psi| op^{(x)K} |psi> by applying op copy by copy, without forming the K-fold power."""
    op_pt = np.asarray(op_pt, dtype=complex)
    ma, nb = _factor_dims(op_pt, factor_dims)
    vec = psi.vector if isinstance(psi, SchmidtPair) else np.asarray(psi, dtype=complex)
    if vec.size != ma**k * nb**k:
        raise DimensionError(f"psi has {vec.size} entries, expected {ma**k * nb**k}")
    op4 = op_pt.reshape(ma, nb, ma, nb)
    t = vec.reshape([ma] * k + [nb] * k)
    for c in range(k):
        t = np.tensordot(op4, t, axes=([2, 3], [c, k + c]))
        t = np.moveaxis(t, [0, 1], [c, k + c])
    return float(np.vdot(vec, t.ravel()).real)


def kcopy_objective_dense(op_pt: np.ndarray, k: int, psi, factor_dims: Sequence[int] | None = None) -> float:
    """Same quantity as :func:`kcopy_objective`, through the explicit tensor power."""
    ma, nb = _factor_dims(np.asarray(op_pt), factor_dims)
    vec = psi.vector if isinstance(psi, SchmidtPair) else np.asarray(psi, dtype=complex)
    big = tensor_power(op_pt, k, (ma, nb))
    return float(np.vdot(vec, big @ vec).real)


def two_copy_operator(x: np.ndarray, y: np.ndarray, factor_dims: Sequence[int]) -> np.ndarray:
    """x on copy 1 and y on copy 2, in the regrouped (A1 A2)(B1 B2) ordering."""
    return regroup_copies(np.kron(x, y), 2, int(factor_dims[0]), int(factor_dims[1]))


def _orthonormal_frames(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.standard_normal((d, 2)) + 1j * rng.standard_normal((d, 2))
    q, _ = np.linalg.qr(z)
    return q


def _copy_product_frames(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Frame spanned by two vectors that are products over the K copies."""
    cols = []
    for _ in range(2):
        v = np.ones(1, dtype=complex)
        for _ in range(k):
            z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            v = np.kron(v, z / np.linalg.norm(z))
        cols.append(v)
    q, _ = np.linalg.qr(np.stack(cols, axis=1))
    return q


def _bob_frame(psi, d_a: int, d_b: int) -> np.ndarray:
    vec = psi.vector if isinstance(psi, SchmidtPair) else np.asarray(psi, dtype=complex)
    if vec.size != d_a * d_b:
        raise DimensionError(f"start vector has {vec.size} entries, expected {d_a * d_b}")
    _, _, vh = np.linalg.svd(vec.reshape(d_a, d_b))
    return vh[:2].T


def _frames_from(coeffs: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(coeffs)
    return q


def _descend(o4, v, tol, max_iter):
    """Alternate exact minimizations over Alice vectors (Bob frame fixed) and Bob vectors.

    ``v`` holds Bob frames, shape (R, dB, 2). Returns Alice frames, Bob frames,
    the best two-term coefficients and the objective values.
    """
    r_count, d_b, _ = v.shape
    d_a = o4.shape[0]
    values = np.full(r_count, np.inf)
    u = np.empty((r_count, d_a, 2), dtype=complex)
    w_coef = np.empty((r_count, 2, d_b), dtype=complex)
    active = np.ones(r_count, dtype=bool)
    it = 0
    while active.any() and it < max_iter:
        it += 1
        idx = np.flatnonzero(active)
        vb = v[idx]
        g = np.einsum("rbk,abcd,rdl->rakcl", vb.conj(), o4, vb, optimize=True).reshape(len(idx), 2 * d_a, 2 * d_a)
        _, vec = np.linalg.eigh(0.5 * (g + g.conj().transpose(0, 2, 1)))
        ua = vec[:, :, 0].reshape(len(idx), d_a, 2)
        frames_a = np.array([_frames_from(x) for x in ua])
        g = np.einsum("rak,abcd,rcl->rkbld", frames_a.conj(), o4, frames_a, optimize=True).reshape(len(idx), 2 * d_b, 2 * d_b)
        lam, vec = np.linalg.eigh(0.5 * (g + g.conj().transpose(0, 2, 1)))
        wb = vec[:, :, 0].reshape(len(idx), 2, d_b)
        u[idx] = frames_a
        w_coef[idx] = wb
        v[idx] = np.array([_frames_from(x.T) for x in wb])
        new = lam[:, 0]
        done = values[idx] - new < tol
        values[idx] = new
        active[idx[done]] = False
    return u, w_coef, values, it


def minimize_kdistill(op_pt: np.ndarray, k: int, restarts: int | None = None, seed=0,
                      factor_dims: Sequence[int] | None = None, hops: int = 2, tol: float = 1e-12,
                      max_iter: int = 3000, agree_tol: float = 1e-6, beta: float | None = None,
                      starts: Sequence = ()) -> DistillScanPoint:
    """Minimize <psi|op^{(x)K}|psi> over normalized psi of Schmidt rank <= 2.

    Equivalently: minimize, over 2-dimensional subspaces S_A and S_B of the
    K-copy local spaces, the lowest eigenvalue of the operator compressed to
    S_A (x) S_B. Each restart alternates exact block minimizations (fix the
    Bob frame, solve for all Alice components; then the reverse), which is
    monotone, and then makes ``hops`` perturbed re-descents that are kept
    only when they improve.

    Restart ``i`` uses the i-th child of ``SeedSequence(seed)``. For K >= 2
    odd restarts start from frames spanned by copy-product vectors, which
    reach minima that factor over the copies far more often than dense
    random frames.
    ``starts`` (SchmidtPairs or vectors) are prepended as extra restarts,
    e.g. minimizers from a neighbouring parameter value.
    """
    op_pt = np.asarray(op_pt, dtype=complex)
    ma, nb = _factor_dims(op_pt, factor_dims)
    if (ma * nb) ** k > max_dim():
        raise DimensionError(f"(MN)^K = {(ma * nb) ** k} exceeds dimension cap {max_dim()}")
    if restarts is None:
        restarts = DEFAULT_RESTARTS.get(k, 64)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    d_a, d_b = ma**k, nb**k
    o4 = hermitize(tensor_power(op_pt, k, (ma, nb))).reshape(d_a, d_b, d_a, d_b)
    rngs = [np.random.default_rng(c) for c in np.random.SeedSequence(seed).spawn(len(starts) + restarts)]

    def draw(i: int) -> np.ndarray:
        if k >= 2 and i % 2 == 1:
            return _copy_product_frames(rngs[i], nb, k)
        return _orthonormal_frames(rngs[i], d_b)

    v = np.array([_bob_frame(x, d_a, d_b) for x in starts]
                 + [draw(i) for i in range(len(starts), len(rngs))]).reshape(len(rngs), d_b, 2)
    u, w, values, _ = _descend(o4, v, tol, max_iter)
    for _ in range(hops):
        kick = np.array([draw(i) for i in range(len(rngs))])
        v_new = np.array([_frames_from(x.T + 0.5 * y) for x, y in zip(w, kick)])
        u_new, w_new, new_values, _ = _descend(o4, v_new, tol, max_iter)
        better = values - new_values > tol
        u[better], w[better], values[better] = u_new[better], w_new[better], new_values[better]

    best = int(np.argmin(values))
    psi = np.einsum("ak,kb->ab", u[best], w[best]).ravel()
    minimizer = SchmidtPair.from_vector(psi, d_a, d_b)
    best_value = float(values[best])
    agree = np.abs(values - best_value) <= agree_tol * max(1.0, abs(best_value))
    return DistillScanPoint(beta, k, best_value, minimizer, len(rngs), float(agree.mean()), seed)


def werner_kdistill(n: int, beta: float, k: int, restarts: int | None = None, seed=0, **kw) -> DistillScanPoint:
    return minimize_kdistill(werner_pt(n, beta, normalize=False), k, restarts, seed, beta=beta, **kw)


def werner_scan(n: int, betas: Sequence[float], k: int, restarts: int | None = None, seed=0,
                warm: bool = True, **kw) -> list[DistillScanPoint]:
    """K-copy minima along a beta grid, in the given order.

    With ``warm`` each point also restarts from the previous minimizer, so a
    minimum found once is followed along the grid.
    """
    out: list[DistillScanPoint] = []
    for b in betas:
        starts = [out[-1].minimizer] if warm and out else []
        out.append(werner_kdistill(n, float(b), k, restarts, seed, starts=starts, **kw))
    return out


def werner_1copy_min(n: int, beta: float) -> float:
    """Exact minimum of <psi|1 - beta P|psi> over Schmidt rank <= 2.

    The overlap of a Schmidt-rank-2 vector with |Psi_max> is at most 2/n and
    the bound is attained, so the minimum is 1 - 2 beta / n for beta >= 0.
    """
    return 1.0 - 2.0 * max(beta, 0.0) / n


def beta_k_bound(k: int) -> float:
    """1 + 3^{-K/3} K^{-1/3}: asymptotic K-copy non-distillability bound for 3x3."""
    if k < 1:
        raise ValueError("K must be >= 1")
    return 1.0 + 3.0 ** (-k / 3) * k ** (-1 / 3)


def random_schmidt_vectors(samples: int, d_a: int, d_b: int, seed=0) -> np.ndarray:
    """Rows are Haar-ish random normalized vectors of Schmidt rank 2."""
    rng = np.random.default_rng(seed)
    za = rng.standard_normal((samples, d_a, 2)) + 1j * rng.standard_normal((samples, d_a, 2))
    zb = rng.standard_normal((samples, d_b, 2)) + 1j * rng.standard_normal((samples, d_b, 2))
    qa, _ = np.linalg.qr(za)
    qb, _ = np.linalg.qr(zb)
    theta = rng.uniform(0, np.pi / 2, samples)
    phase = np.exp(2j * np.pi * rng.uniform(size=samples))
    coef = np.stack([np.cos(theta), np.sin(theta) * phase], axis=1)
    return np.einsum("rk,rak,rbk->rab", coef, qa, qb).reshape(samples, d_a * d_b)


def certificate_operators(n: int = 3) -> dict[str, np.ndarray]:
    """Two-copy operators of the non-2-distillability chain, Q = 1 - P.

    ``chain_left`` Q (x) (Q - P/2), ``chain_right`` (Q - P/2) (x) Q, and ``gap`` the gap
    (Q - P/4) (x) (Q - P/4) - P (x) P / 16, which equals (chain_left + chain_right) / 2.
    """
    p = max_entangled_projector(n)
    q = np.eye(n * n) - p
    dims = (n, n)
    half = q - 0.5 * p
    quarter = q - 0.25 * p
    return {
        "chain_left": two_copy_operator(q, half, dims),
        "chain_right": two_copy_operator(half, q, dims),
        "gap": two_copy_operator(quarter, quarter, dims) - two_copy_operator(p, p, dims) / 16,
    }


def _quadratic_min(op: np.ndarray, vecs: np.ndarray, chunk: int = 10_000) -> float:
    out = np.inf
    for start in range(0, len(vecs), chunk):
        v = vecs[start:start + chunk]
        out = min(out, float(np.einsum("ri,ij,rj->r", v.conj(), op, v).real.min()))
    return out


@dataclass(frozen=True)
class CertificateReport:
    beta: float
    status: str
    samples: int
    min_chain_left: float
    min_chain_right: float
    min_gap: float
    min_objective: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def two_copy_certificate(beta: float, samples: int = 10_000, seed=0, slack: float = 1e-10,
                         extra: np.ndarray | None = None) -> CertificateReport:
    """Audit the two-copy chain on sampled Schmidt pairs and classify beta (N = 3).

    beta <= 1: the partial transpose is PSD, status ``ppt``.
    1 < beta <= 5/4 with every audited value >= -slack:
    ``not_2_distillable_certified``. Otherwise ``inconclusive``. ``extra``
    holds additional rows of test vectors (e.g. the psi* family).
    """
    n = 3
    vecs = random_schmidt_vectors(samples, n * n, n * n, seed)
    if extra is not None:
        vecs = np.vstack([vecs, np.atleast_2d(extra)])
    ops = certificate_operators(n)
    mins = {name: _quadratic_min(op, vecs) for name, op in ops.items()}
    obj = two_copy_operator(*(2 * [werner_pt(n, beta, normalize=False)]), (n, n))
    min_obj = _quadratic_min(obj, vecs)
    chain_ok = all(v >= -slack for v in mins.values())
    if beta <= 1:
        status = "ppt"
    elif beta <= 1.25 and chain_ok and min_obj >= -slack:
        status = "not_2_distillable_certified"
    else:
        status = "inconclusive"
    return CertificateReport(beta, status, len(vecs), mins["chain_left"], mins["chain_right"], mins["gap"], min_obj)
