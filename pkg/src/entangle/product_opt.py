"""Extremize <e,f|H|e,f> over normalized product vectors.

Alternating eigen-iteration: with e fixed the best f is an extremal
eigenvector of the compressed N x N operator <e|H|e>, and vice versa. Every
half-step solves its subproblem exactly, so each restart is monotone. Restarts
run as one batched computation; restart ``i`` draws its start from the i-th
child of ``SeedSequence(seed)``, so results do not depend on batching.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .states import ProductVector
from .tensor import DimensionError, hermitize, is_hermitian

DEFAULT_RESTARTS = 512
DEFAULT_HOPS = 4


@dataclass(frozen=True, eq=False)
class ProductOptResult:
    """Best product vector found plus confidence information.

    ``certified_bound`` is lambda_max(H) for maximization and lambda_min(H)
    for minimization: a guaranteed bound on the true optimum, not the optimum.
    ``converged_fraction`` is the share of restarts ending within
    ``agree_tol`` of the best value.
    """

    value: float
    vector: ProductVector
    direction: str
    restarts_used: int
    converged_fraction: float
    certified_bound: float
    values: np.ndarray = field(repr=False)
    e_vectors: np.ndarray = field(repr=False)
    f_vectors: np.ndarray = field(repr=False)
    iterations: int = 0
    history: list | None = field(default=None, repr=False)

    def candidates(self, min_value: float | None = None) -> list[ProductVector]:
        """Restart endpoints, best first; optionally only those with value >= min_value."""
        order = np.argsort(-self.values if self.direction == "max" else self.values, kind="stable")
        out = []
        for i in order:
            if min_value is not None and self.values[i] < min_value:
                continue
            out.append(ProductVector.normalized(self.e_vectors[i], self.f_vectors[i]))
        return out


def _restart_rngs(restarts: int, seed) -> list[np.random.Generator]:
    return [np.random.default_rng(c) for c in np.random.SeedSequence(seed).spawn(restarts)]


def _draw(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.standard_normal((2, d))
    z = z[0] + 1j * z[1]
    return z / np.linalg.norm(z)


def _ascend(h4, e, f, pick, sign, tol, max_iter, history=None):
    """Alternating exact half-steps on a batch until every restart stalls."""
    values = np.einsum("ra,rb,abcd,rc,rd->r", e.conj(), f.conj(), h4, e, f).real
    active = np.ones(len(values), dtype=bool)
    it = 0
    while active.any() and it < max_iter:
        it += 1
        idx = np.flatnonzero(active)
        ea = e[idx]
        b_op = np.einsum("ra,abcd,rc->rbd", ea.conj(), h4, ea)
        _, v = np.linalg.eigh(hermitize_batch(b_op))
        fa = v[:, :, pick]
        a_op = np.einsum("rb,abcd,rd->rac", fa.conj(), h4, fa)
        w, v = np.linalg.eigh(hermitize_batch(a_op))
        e[idx] = v[:, :, pick]
        f[idx] = fa
        new = w[:, pick]
        done = sign * (new - values[idx]) < tol
        values[idx] = new
        active[idx[done]] = False
        if history is not None:
            history.append(values.copy())
    return values, it


def extremize_product_overlap(
    h: np.ndarray,
    dims: Sequence[int],
    direction: str = "max",
    restarts: int = DEFAULT_RESTARTS,
    seed=0,
    starts: Sequence[ProductVector] = (),
    hops: int = DEFAULT_HOPS,
    hop_scale: float = 1.0,
    tol: float = 1e-12,
    max_iter: int = 5000,
    agree_tol: float = 1e-6,
    record_history: bool = False,
) -> ProductOptResult:
    """Maximize or minimize <e,f|h|e,f> over product vectors.

    Each restart ascends from its start, then makes ``hops`` attempts to leave
    its basin: both local vectors are kicked by ``hop_scale`` times a random
    unit vector, re-ascended, and the move is kept only if it improves. The
    per-restart objective sequence is therefore monotone. ``starts`` are extra
    feasible starting points placed before the random ones; ties in the final
    value go to the lowest restart index.
    """
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    if restarts < 0 or restarts + len(starts) < 1:
        raise ValueError("need at least one restart")
    dim_a, dim_b = int(dims[0]), int(dims[1])
    h = np.asarray(h, dtype=complex)
    if h.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimensionError(f"operator shape {h.shape} does not match dims ({dim_a}, {dim_b})")
    if not is_hermitian(h, tol=1e-10):
        raise ValueError("operator must be Hermitian")
    h = hermitize(h)
    h4 = h.reshape(dim_a, dim_b, dim_a, dim_b)
    pick = -1 if direction == "max" else 0
    sign = 1.0 if direction == "max" else -1.0

    rngs = _restart_rngs(len(starts) + restarts, seed)
    e = np.empty((len(rngs), dim_a), dtype=complex)
    f = np.empty((len(rngs), dim_b), dtype=complex)
    for i, pv in enumerate(starts):
        e[i], f[i] = pv.e, pv.f
    for i in range(len(starts), len(rngs)):
        e[i], f[i] = _draw(rngs[i], dim_a), _draw(rngs[i], dim_b)

    history = [] if record_history else None
    values, it = _ascend(h4, e, f, pick, sign, tol, max_iter, history)
    for _ in range(hops):
        e_new = np.array([_draw(r, dim_a) for r in rngs])
        f_new = np.array([_draw(r, dim_b) for r in rngs])
        e_new = e + hop_scale * e_new
        f_new = f + hop_scale * f_new
        e_new /= np.linalg.norm(e_new, axis=1, keepdims=True)
        f_new /= np.linalg.norm(f_new, axis=1, keepdims=True)
        new_values, n_it = _ascend(h4, e_new, f_new, pick, sign, tol, max_iter)
        it += n_it
        better = sign * (new_values - values) > tol
        e[better], f[better], values[better] = e_new[better], f_new[better], new_values[better]
        if history is not None:
            history.append(values.copy())

    best = int(np.argmax(sign * values))
    best_value = float(values[best])
    spectrum = np.linalg.eigvalsh(h)
    bound = float(spectrum[-1] if direction == "max" else spectrum[0])
    agree = np.abs(values - best_value) <= agree_tol * max(1.0, abs(best_value))
    return ProductOptResult(
        value=best_value,
        vector=ProductVector.normalized(e[best], f[best]),
        direction=direction,
        restarts_used=len(rngs),
        converged_fraction=float(agree.mean()),
        certified_bound=bound,
        values=values,
        e_vectors=e,
        f_vectors=f,
        iterations=it,
        history=history,
    )


def hermitize_batch(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().transpose(0, 2, 1))


def product_expectation(h: np.ndarray, pv: ProductVector) -> float:
    v = pv.vector
    return float(np.vdot(v, h @ v).real)


