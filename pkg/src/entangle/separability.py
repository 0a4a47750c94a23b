"""Separability and inseparability criteria.

Every check returns a :class:`Verdict`. Certified statuses come only from
criteria that do not depend on a heuristic optimum; anything resting on the
product-vector optimizer is labelled ``entangled_heuristic``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .product_opt import DEFAULT_RESTARTS, extremize_product_overlap
from .states import ProductVector
from .tensor import (
    DEFAULT_TOL,
    BipartiteState,
    ToleranceConfig,
    _operator,
    gell_mann_basis,
    hermitize,
    min_eig,
    numerical_kernel,
    partial_trace,
    partial_transpose,
    realign_to_correlation,
)


class Status(str, Enum):
    SEPARABLE_CERTIFIED = "separable_certified"
    ENTANGLED_CERTIFIED = "entangled_certified"
    ENTANGLED_HEURISTIC = "entangled_heuristic"
    INCONCLUSIVE = "inconclusive"
    # refinements of "inconclusive"
    INCONCLUSIVE_PPT = "inconclusive-PPT"
    BINARY_PSEUDOMIXTURE = "binary_pseudomixture"


@dataclass(frozen=True)
class Verdict:
    status: Status
    criterion: str
    margin: float
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def entangled(self) -> bool:
        return self.status in (Status.ENTANGLED_CERTIFIED, Status.ENTANGLED_HEURISTIC)

    def to_dict(self) -> dict[str, Any]:
        return {
            "criterion": self.criterion,
            "status": self.status.value,
            "margin": float(self.margin),
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)) and not isinstance(x, bool):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def ppt_check(state: BipartiteState, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Peres test; PPT is also sufficient when M N <= 6."""
    margin = min_eig(partial_transpose(state, "A"))
    if margin < -tol.tol_psd:
        status = Status.ENTANGLED_CERTIFIED
    elif state.dim_a * state.dim_b <= 6:
        status = Status.SEPARABLE_CERTIFIED
    else:
        status = Status.INCONCLUSIVE_PPT
    return Verdict(status, "ppt", margin, {"min_eig_pt": margin, "ppt": margin >= -tol.tol_psd})


def reduction_check(state: BipartiteState, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """1 (x) rho_B - rho >= 0 and rho_A (x) 1 - rho >= 0; violation implies distillable."""
    rho = state.rho
    ma, nb = state.dims
    rho_a = partial_trace(state, "B")
    rho_b = partial_trace(state, "A")
    lam_b = min_eig(np.kron(np.eye(ma), rho_b) - rho)
    lam_a = min_eig(np.kron(rho_a, np.eye(nb)) - rho)
    margin = min(lam_a, lam_b)
    violated = margin < -tol.tol_psd
    status = Status.ENTANGLED_CERTIFIED if violated else Status.INCONCLUSIVE
    return Verdict(status, "reduction", margin,
                   {"min_eig_1_rhoB": lam_b, "min_eig_rhoA_1": lam_a, "distillable": violated})


def rank_criterion_check(state: BipartiteState, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """A reduced state of larger rank than rho itself certifies distillability."""
    r = numerical_kernel(state.rho, tol).rank
    r_a = numerical_kernel(partial_trace(state, "B"), tol).rank
    r_b = numerical_kernel(partial_trace(state, "A"), tol).rank
    margin = max(r_a, r_b) - r
    fired = margin > 0
    status = Status.ENTANGLED_CERTIFIED if fired else Status.INCONCLUSIVE
    return Verdict(status, "rank", float(margin),
                   {"rank": r, "rank_a": r_a, "rank_b": r_b, "distillable": fired})


def lemma1_quantities(state: BipartiteState) -> dict[str, float]:
    rho = state.rho
    rho_tb = partial_transpose(state, "B")
    return {
        "tr_rho2": float(np.trace(rho @ rho).real),
        "tr_ptb2": float(np.trace(rho_tb @ rho_tb).real),
        "tr_rho_ptb": float(np.trace(rho @ rho_tb).real),
    }


def lemma1_check(state: BipartiteState, restarts: int = DEFAULT_RESTARTS, seed=0,
                 tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Purity-type quantities versus the maximal product-vector overlap r.

    If max(Tr rho^2, Tr (rho^TB)^2, Tr rho rho^TB) exceeds r the state is
    entangled. r comes from a multi-start heuristic, so the verdict is at best
    ``entangled_heuristic``.
    """
    q = lemma1_quantities(state)
    lhs = max(q.values())
    opt = extremize_product_overlap(state.rho, state.dims, "max", restarts=restarts, seed=seed)
    r = opt.value
    margin = lhs - r
    status = Status.ENTANGLED_HEURISTIC if margin > tol.tol_zero else Status.INCONCLUSIVE
    details = dict(q)
    details.update(
        lhs=lhs,
        r=r,
        r_upper_bound=opt.certified_bound,
        converged_fraction=opt.converged_fraction,
        restarts=opt.restarts_used,
        seed=seed,
    )
    return Verdict(status, "lemma1", margin, details)


@dataclass(frozen=True, eq=False)
class BinaryMixtureSolution:
    """A solution (mu, nu) of M(mu, nu) = 0 together with the induced split.

    ``terms`` lists ``(weight, rho_a, rho_b)`` of the two-term mixture
    p mu (x) nu_1 + (1 - p) mu_2 (x) nu; it is empty when no valid p exists.
    """

    mu: np.ndarray
    nu: np.ndarray
    p: float | None
    branch: str
    scale: float
    separable: bool
    terms: tuple = ()
    reconstruction_error: float | None = None


def _whiten(rho_r: np.ndarray, x: np.ndarray, tol: ToleranceConfig):
    """Range basis of rho_r and the spectrum of rho^{-1/2} x rho^{-1/2} on it.

    Returns None when x is not supported on the range of rho_r.
    """
    w, v = np.linalg.eigh(hermitize(rho_r))
    keep = w > tol.tol_rank * w[-1]
    vr, wr = v[:, keep], w[keep]
    proj = vr @ vr.conj().T
    if np.abs(x - proj @ x @ proj).max() > 1e-7 * max(1.0, np.abs(x).max()):
        return None
    inv_sqrt = vr / np.sqrt(wr)
    xi = np.linalg.eigvalsh(hermitize(inv_sqrt.conj().T @ x @ inv_sqrt))
    return xi[0], xi[-1]


def binary_mixture_check(state: BipartiteState, tol: ToleranceConfig = DEFAULT_TOL
                         ) -> tuple[Verdict, list[BinaryMixtureSolution]]:
    """Decide whether rho is a mixture of two product states.

    M(mu, nu) = rho - mu (x) rho_B - rho_A (x) nu + mu (x) nu vanishes iff
    (mu - rho_A) (x) (nu - rho_B) = rho_A (x) rho_B - rho =: C. Solutions exist
    iff C has operator-Schmidt rank <= 1; writing C = x (x) y gives the curve
    mu = rho_A + s x, nu = rho_B + y / s. On each sign branch of s, positivity
    of mu, nu and the existence of a valid weight p reduce to the extreme
    eigenvalues xi, eta of the whitened factors rho_A^{-1/2} x rho_A^{-1/2}
    and rho_B^{-1/2} y rho_B^{-1/2}:

    * s > 0: mu, nu >= 0 feasible iff xi_min eta_min <= 1, valid p iff xi_max eta_max <= 1
    * s < 0: the same with min and max exchanged.
    """
    ma, nb = state.dims
    rho = state.rho
    rho_a = partial_trace(state, "B")
    rho_b = partial_trace(state, "A")
    c = np.kron(rho_a, rho_b) - rho
    coef = realign_to_correlation(c, dims=state.dims)
    u, sv, vt = np.linalg.svd(coef)
    details: dict[str, Any] = {"singular_values": sv[:3].tolist()}

    if sv[0] <= tol.tol_rank:
        sol = BinaryMixtureSolution(rho_a, rho_b, 1.0, "product", 0.0, True,
                                    ((1.0, rho_a, rho_b),), float(np.abs(np.kron(rho_a, rho_b) - rho).max()))
        return Verdict(Status.SEPARABLE_CERTIFIED, "binary_mixture", float(-sv[0]),
                       {**details, "correlation_rank": 0}), [sol]
    if sv[1] > tol.tol_rank * sv[0]:
        details["correlation_rank"] = int((sv > tol.tol_rank * sv[0]).sum())
        return Verdict(Status.INCONCLUSIVE, "binary_mixture", float(-sv[1] / sv[0]), details), []
    details["correlation_rank"] = 1

    root = np.sqrt(sv[0])
    x = np.einsum("i,iab->ab", root * u[:, 0], gell_mann_basis(ma))
    y = np.einsum("j,jab->ab", root * vt[0], gell_mann_basis(nb))
    spec_x = _whiten(rho_a, x, tol)
    spec_y = _whiten(rho_b, y, tol)
    if spec_x is None or spec_y is None:
        details["reason"] = "correlation factor leaves the range of a reduced state"
        return Verdict(Status.INCONCLUSIVE, "binary_mixture", float("-1"), details), []
    xi_min, xi_max = spec_x
    eta_min, eta_max = spec_y

    slack = 1e-9
    solutions = []
    branch_margins = []
    for branch, psd_prod, p_prod in (("+", xi_min * eta_min, xi_max * eta_max),
                                     ("-", xi_max * eta_max, xi_min * eta_min)):
        if psd_prod > 1 + slack:
            branch_margins.append(1 - psd_prod)
            continue
        if branch == "+":
            lo, hi = -eta_min, -1 / xi_min
            s = np.sqrt(lo * hi)
            a, b = 1 + s * xi_max, 1 + eta_max / s
        else:
            lo, hi = -1 / xi_max, -eta_max
            s = -np.sqrt(lo * hi)
            a, b = 1 + s * xi_min, 1 + eta_min / s
        mu = rho_a + s * x
        nu = rho_b + y / s
        branch_margins.append(min(1 - psd_prod, 1 - p_prod))
        if p_prod > 1 + slack:
            solutions.append(BinaryMixtureSolution(mu, nu, None, branch, s, False))
            continue
        p_lo, p_hi = max(0.0, 1 - 1 / b), min(1.0, 1 / a)
        p = 0.5 * (p_lo + p_hi)
        nu1 = (rho_b - (1 - p) * nu) / p
        mu2 = (rho_a - p * mu) / (1 - p)
        terms = ((p, mu, nu1), (1 - p, mu2, nu))
        recon = sum(w * np.kron(ra, rb) for w, ra, rb in terms)
        err = float(np.abs(recon - rho).max())
        ok = all(min_eig(m) >= -tol.tol_psd for _, ra, rb in terms for m in (ra, rb)) and err <= 1e-8
        solutions.append(BinaryMixtureSolution(mu, nu, p, branch, s, ok, terms, err))

    details.update(xi=[xi_min, xi_max], eta=[eta_min, eta_max])
    margin = max(branch_margins)
    if any(sol.separable for sol in solutions):
        status = Status.SEPARABLE_CERTIFIED
    elif solutions:
        status = Status.BINARY_PSEUDOMIXTURE
    else:
        status = Status.INCONCLUSIVE
    return Verdict(status, "binary_mixture", margin, details), solutions


def _range_basis(op: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(op))
    return v[:, w > tol.tol_rank * max(w[-1], 0.0)]


def subtract_product_vector(x, pv: ProductVector, dims: Sequence[int] | None = None,
                            tol: ToleranceConfig = DEFAULT_TOL, range_tol: float = 1e-10,
                            iterations: int = 60) -> tuple[float, np.ndarray]:
    """Largest lambda in [0, 1] keeping rho - lambda |e,f><e,f| and its partial transpose PSD.

    Returns ``(lambda, residual)`` with the residual unnormalized. lambda is 0
    when |e,f> is outside R(rho) or |e*,f> is outside R(rho^TA) (squared
    distance above ``range_tol``). Positivity is bisected on the compressions
    to the numerical ranges, so eigenvalues already at rounding level in the
    kernels never block later subtractions.
    """
    rho, dims = _operator(x, dims)
    rho_ta = partial_transpose(rho, "A", dims)
    v = pv.vector
    w = pv.conj_a().vector
    blocks = []
    for op, vec in ((rho, v), (rho_ta, w)):
        basis = _range_basis(op, tol)
        coords = basis.conj().T @ vec
        if 1.0 - np.linalg.norm(coords) ** 2 > range_tol:
            return 0.0, rho.copy()
        blocks.append((basis.conj().T @ op @ basis, np.outer(coords, coords.conj())))

    def feasible(lam: float) -> bool:
        return all(min_eig(op - lam * proj) >= 0.0 for op, proj in blocks)

    if feasible(1.0):
        lam = 1.0
    else:
        lo, hi = 0.0, 1.0
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        lam = lo
    return lam, rho - lam * np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class EdgeDecomposition:
    """rho = weight * separable_part + (1 - weight) * delta."""

    weight: float
    weights: tuple
    vectors: tuple
    residual: np.ndarray
    delta: np.ndarray | None
    steps: int

    @property
    def separable_part(self) -> np.ndarray | None:
        if self.weight <= 0:
            return None
        return sum(w * pv.projector() for w, pv in zip(self.weights, self.vectors)) / self.weight


def _best_lambda_estimate(r: np.ndarray, r_ta: np.ndarray, pv: ProductVector, tol: ToleranceConfig) -> float:
    v, w = pv.vector, pv.conj_a().vector
    a = np.vdot(v, np.linalg.pinv(r, rcond=tol.tol_rank, hermitian=True) @ v).real
    b = np.vdot(w, np.linalg.pinv(r_ta, rcond=tol.tol_rank, hermitian=True) @ w).real
    return min(1 / a if a > 0 else 0.0, 1 / b if b > 0 else 0.0)


def edge_decompose(state: BipartiteState, budget: int = 32, seed=0, restarts: int = 128,
                   tol: ToleranceConfig = DEFAULT_TOL, candidates: int = 32) -> EdgeDecomposition:
    """Greedy subtraction of product-vector projectors until an edge residual remains.

    Each step looks for product vectors |e,f> in R(R) with |e*,f> in R(R^TA)
    by maximizing <e,f|Pi_R + (Pi_{R^TA})^TA|e,f> (value 2 means both range
    conditions hold), subtracts the candidate admitting the largest weight and
    repeats. The accumulated weight is not claimed to be maximal.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    dims = state.dims
    d = dims[0] * dims[1]
    r = np.array(state.rho)
    weights, vectors = [], []
    steps = 0
    for step in range(budget):
        if np.trace(r).real <= tol.tol_zero:
            break
        steps += 1
        r_ta = partial_transpose(r, "A", dims)
        pi = np.eye(d) - numerical_kernel(hermitize(r), tol).projector
        pi_ta = np.eye(d) - numerical_kernel(hermitize(r_ta), tol).projector
        h = pi + partial_transpose(pi_ta, "A", dims)
        opt = extremize_product_overlap(h, dims, "max", restarts=restarts, seed=[seed, step], hops=1)
        pool = opt.candidates(min_value=2.0 - 1e-10)[:candidates]
        if not pool:
            break
        scored = [(_best_lambda_estimate(r, r_ta, pv, tol), i) for i, pv in enumerate(pool)]
        _, best = max(scored, key=lambda t: (t[0], -t[1]))
        # the restart tolerance leaves ~1e-6 error in the vector; polish before subtracting
        chosen = extremize_product_overlap(h, dims, "max", restarts=0, starts=[pool[best]], hops=0,
                                           tol=0.0, max_iter=500).vector
        lam, residual = subtract_product_vector(r, chosen, dims, tol)
        if lam <= tol.tol_zero:
            break
        weights.append(lam)
        vectors.append(chosen)
        r = hermitize(residual)
    total = float(sum(weights))
    rest = 1.0 - total
    delta = r / rest if rest > tol.tol_zero else None
    return EdgeDecomposition(total, tuple(weights), tuple(vectors), r, delta, steps)
