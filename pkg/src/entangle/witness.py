"""Entanglement witnesses built from kernels and from the maximal product overlap."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .product_opt import DEFAULT_RESTARTS, extremize_product_overlap
from .separability import lemma1_quantities
from .tensor import (
    DEFAULT_TOL,
    BipartiteState,
    DimensionError,
    ToleranceConfig,
    hermitize,
    is_hermitian,
    numerical_kernel,
    partial_transpose,
)


class WitnessConstructionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WitnessOperator:
    """Hermitian E with Tr(E sigma) >= 0 on separable sigma (up to the accuracy of epsilon / r).

    ``epsilon`` is the subtracted constant for ``edge`` witnesses and the
    maximal product overlap r for ``lemma1`` witnesses; ``confidence`` is the
    converged fraction of the optimization that produced it.
    """

    e_matrix: np.ndarray
    dims: tuple[int, int]
    construction: str
    epsilon: float
    confidence: float
    degenerate: bool = False
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not is_hermitian(self.e_matrix, tol=1e-10):
            raise ValueError("witness operator must be Hermitian")


def build_edge_witness(state: BipartiteState, restarts: int = DEFAULT_RESTARTS, seed=0,
                       tol: ToleranceConfig = DEFAULT_TOL) -> WitnessOperator:
    """E = P_K(rho) + (P_K(rho^TA))^TA - epsilon * 1.

    epsilon is the minimum of <e,f|P_K(rho) + (P_K(rho^TA))^TA|e,f> over
    product vectors. It is zero (degenerate witness) whenever some |e,f> lies
    in R(rho) with |e*,f> in R(rho^TA), e.g. for every full-rank rho.
    """
    dims = state.dims
    k_rho = numerical_kernel(state.rho, tol).projector
    k_pt = numerical_kernel(hermitize(partial_transpose(state, "A")), tol).projector
    base = hermitize(k_rho + partial_transpose(k_pt, "A", dims))
    opt = extremize_product_overlap(base, dims, "min", restarts=restarts, seed=seed)
    eps = max(opt.value, 0.0)
    e = base - eps * np.eye(base.shape[0])
    return WitnessOperator(
        e, dims, "edge", eps, opt.converged_fraction,
        degenerate=eps <= tol.tol_zero,
        metadata={
            "kernel_dim": int(round(np.trace(k_rho).real)),
            "kernel_dim_pt": int(round(np.trace(k_pt).real)),
            "restarts": opt.restarts_used,
            "seed": seed,
        },
    )


def build_lemma1_witness(state: BipartiteState, restarts: int = DEFAULT_RESTARTS, seed=0,
                         tol: ToleranceConfig = DEFAULT_TOL) -> WitnessOperator:
    """X = 1 - rho / r, with r the (heuristic) maximal product overlap.

    Refuses when Tr(rho^2) <= r + tol_zero, since X then does not detect rho.
    """
    q = lemma1_quantities(state)
    opt = extremize_product_overlap(state.rho, state.dims, "max", restarts=restarts, seed=seed)
    r = opt.value
    if not q["tr_rho2"] > r + tol.tol_zero:
        raise WitnessConstructionError(
            f"Tr(rho^2) = {q['tr_rho2']:.12g} does not exceed r = {r:.12g}; X would not detect rho"
        )
    x = np.eye(state.rho.shape[0]) - state.rho / r
    return WitnessOperator(
        x, state.dims, "lemma1", r, opt.converged_fraction,
        metadata={"restarts": opt.restarts_used, "seed": seed, **q},
    )


def evaluate_witness(w: WitnessOperator, state) -> float:
    """Tr(E rho) for a state or a bare operator of matching size."""
    rho = state.rho if isinstance(state, BipartiteState) else np.asarray(state)
    if isinstance(state, BipartiteState) and state.dims != w.dims:
        raise DimensionError(f"witness dims {w.dims} do not match state dims {state.dims}")
    if rho.shape != w.e_matrix.shape:
        raise DimensionError(f"witness shape {w.e_matrix.shape} does not match operator {rho.shape}")
    return float(np.einsum("ij,ji->", w.e_matrix, rho).real)


def audit_on_product_states(w: WitnessOperator, samples: int = 10_000, seed=0) -> float:
    """Minimum of Tr(E |e,f><e,f|) over Haar-random product vectors."""
    rng = np.random.default_rng(seed)
    ma, nb = w.dims
    e = rng.standard_normal((samples, ma)) + 1j * rng.standard_normal((samples, ma))
    f = rng.standard_normal((samples, nb)) + 1j * rng.standard_normal((samples, nb))
    e /= np.linalg.norm(e, axis=1, keepdims=True)
    f /= np.linalg.norm(f, axis=1, keepdims=True)
    v = np.einsum("ra,rb->rab", e, f).reshape(samples, ma * nb)
    vals = np.einsum("ri,ij,rj->r", v.conj(), w.e_matrix, v).real
    return float(vals.min())


def witness_min_on_products(w: WitnessOperator, restarts: int = 256, seed=12345) -> float:
    """Optimized minimum of Tr(E |e,f><e,f|), an adversarial counterpart to the Monte-Carlo audit."""
    return extremize_product_overlap(w.e_matrix, w.dims, "min", restarts=restarts, seed=seed).value
