"""Local-minimum analysis of the two-copy objective for 3x3 Werner-type operators.

The family of two-copy operators

    B(lam) = (1 + |1 - 2 lam|) 1(x)1 + (9/4) P(x)P - 3 (lam 1(x)P + (1 - lam) P(x)1)

interpolates the partial transposes of two Werner copies; at lam = 1/2 it
equals (1 - 3P/2)^{(x)2}. The objective is f(lam, psi) = <psi|B(lam)|psi> / M^2
with M = 3. The vectors psi* (maximally entangled in copy one, product in copy
two) give f = 0 for lam <= 1/2, and the 7-parameter perturbation below probes
their second-order neighbourhood.

Orderings follow the rest of the package: copy one is the slow index on each
side, so a two-copy Alice basis vector is |a1 a2>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distill import SchmidtPair, two_copy_operator
from .states import max_entangled_projector

FAMILY_M = 3
_D = 3
_DIMS = (_D, _D)


def _check_lambda(lam: float, lo: float = 0.0, hi: float = 1.0) -> None:
    if not lo <= lam <= hi:
        raise ValueError(f"lambda must lie in [{lo}, {hi}], got {lam}")


def component_operators() -> dict[str, np.ndarray]:
    p = max_entangled_projector(_D)
    one = np.eye(_D * _D)
    return {
        "1x1": two_copy_operator(one, one, _DIMS),
        "1xP": two_copy_operator(one, p, _DIMS),
        "Px1": two_copy_operator(p, one, _DIMS),
        "PxP": two_copy_operator(p, p, _DIMS),
    }


_COMPONENTS = component_operators()


def family_bracket(lam: float) -> np.ndarray:
    """B(lam), the operator without the 1/M^2 factor."""
    _check_lambda(lam)
    c = _COMPONENTS
    return ((1 + abs(1 - 2 * lam)) * c["1x1"] + 2.25 * c["PxP"]
            - 3 * (lam * c["1xP"] + (1 - lam) * c["Px1"]))


def family_operator(lam: float) -> np.ndarray:
    return family_bracket(lam) / FAMILY_M**2


def _vec(psi) -> np.ndarray:
    return psi.vector if isinstance(psi, SchmidtPair) else np.asarray(psi, dtype=complex)


def family_components(psi) -> dict[str, float]:
    """The four expectations <1(x)1>, <1(x)P>, <P(x)1>, <P(x)P>."""
    v = _vec(psi)
    return {k: float(np.vdot(v, op @ v).real) for k, op in _COMPONENTS.items()}


def family_objective(lam: float, psi, normalized: bool = True) -> float:
    """f(lam, psi), assembled from the four component expectations."""
    _check_lambda(lam)
    c = family_components(psi)
    val = ((1 + abs(1 - 2 * lam)) * c["1x1"] + 2.25 * c["PxP"]
           - 3 * (lam * c["1xP"] + (1 - lam) * c["Px1"]))
    return val / FAMILY_M**2 if normalized else val


def _basis(k: int) -> np.ndarray:
    e = np.zeros(_D, dtype=complex)
    e[k] = 1.0
    return e


def _check_indices(i: int, j: int, r: int, s: int) -> None:
    for x in (i, j, r, s):
        if x not in range(_D):
            raise ValueError(f"basis index {x} outside 0..{_D - 1}")
    if i == j or r == s:
        raise ValueError("psi* needs i != j and r != s")


def psi_star(i: int = 0, j: int = 1, r: int = 0, s: int = 1, phi: float = 0.0) -> SchmidtPair:
    """(|i r>_A |i s>_B + e^{i phi} |j r>_A |j s>_B) / sqrt(2)."""
    _check_indices(i, j, r, s)
    ki, kj, kr, ks = map(_basis, (i, j, r, s))
    h = 1 / np.sqrt(2)
    return SchmidtPair(h, h * np.exp(1j * phi), np.kron(ki, kr), np.kron(kj, kr),
                       np.kron(ki, ks), np.kron(kj, ks))


def swap_copies(psi) -> np.ndarray:
    """Exchange copy one and copy two on both sides."""
    v = _vec(psi).reshape(_D, _D, _D, _D)
    return v.transpose(1, 0, 3, 2).reshape(-1)


def psi_bullet(i: int = 0, j: int = 1, r: int = 0, s: int = 1, phi: float = 0.0) -> np.ndarray:
    """Mirror of psi*, a zero of f for lam >= 1/2."""
    return swap_copies(psi_star(i, j, r, s, phi))


def _third(a: int, b: int) -> int:
    return ({0, 1, 2} - {a, b}).pop()


def perturbed_psi_star(delta, i: int = 0, j: int = 1, r: int = 0, s: int = 1,
                       t_equals_s: bool = False) -> np.ndarray:
    """Seven-parameter deformation of psi* (phi = 0), unnormalized.

    A1 = |i r>,               B1 = |(i + d1 q)(s + d2 r)>
    A2 = |(j + d3 q)(r + d4 t)>, B2 = |(j + i d5 q)(s + d6 r)>
    psi = (sqrt(1 + d0) A1 B1 + sqrt(1 - d0) A2 B2) / sqrt(2)

    q is the basis vector orthogonal to i and j; t is the one orthogonal to r
    and s, or s itself when ``t_equals_s``. The phase on d5 keeps the
    deformation free of a first-order coupling to d3.
    """
    _check_indices(i, j, r, s)
    d0, d1, d2, d3, d4, d5, d6 = np.asarray(delta, dtype=float)
    q = _basis(_third(i, j))
    t = _basis(s if t_equals_s else _third(r, s))
    ki, kj, kr, ks = map(_basis, (i, j, r, s))
    a1 = np.kron(ki, kr)
    b1 = np.kron(ki + d1 * q, ks + d2 * kr)
    a2 = np.kron(kj + d3 * q, kr + d4 * t)
    b2 = np.kron(kj + 1j * d5 * q, ks + d6 * kr)
    return (np.sqrt(1 + d0) * np.kron(a1, b1) + np.sqrt(1 - d0) * np.kron(a2, b2)) / np.sqrt(2)


def hessian_closed_forms(lam: float, t_equals_s: bool = False) -> tuple[np.ndarray, float]:
    """Second derivatives of B(lam) along the deformation, at delta = 0.

    Returns the seven diagonal entries and the single mixed entry (d2, d6).
    """
    a = 1 + abs(1 - 2 * lam)
    k = 1.0 if t_equals_s else 0.0
    diag = np.array([
        1 - lam,
        a,
        a - 0.75,
        a,
        a + 0.25 * k - (lam * k + 1 - lam),
        a,
        a - 0.75,
    ])
    return diag, lam - 0.75


def det26(lam: float) -> float:
    """Determinant of the (d2, d6) block: 3 lam^2 - 7 lam / 2 + 1."""
    return 3 * lam**2 - 3.5 * lam + 1


@dataclass(frozen=True, eq=False)
class HessianReport:
    lam: float
    t_equals_s: bool
    step: float
    gradient: np.ndarray
    hessian: np.ndarray
    expected_diag: np.ndarray
    expected_26: float
    det26_formula: float
    det26_numeric: float

    @property
    def max_gradient(self) -> float:
        return float(np.abs(self.gradient).max())

    @property
    def diag_error(self) -> float:
        return float(np.abs(np.diag(self.hessian) - self.expected_diag).max())

    @property
    def offdiag_error(self) -> float:
        """Deviation of the (d2, d6) entry from its closed form."""
        return float(abs(self.hessian[2, 6] - self.expected_26))

    @property
    def spurious_offdiag(self) -> float:
        """Largest mixed entry other than (d2, d6)."""
        h = self.hessian.copy()
        np.fill_diagonal(h, 0.0)
        h[2, 6] = h[6, 2] = 0.0
        return float(np.abs(h).max())


def hessian_check(lam: float, t_equals_s: bool = False, step: float = 1e-4) -> HessianReport:
    """Central-difference gradient and Hessian of B(lam) along the deformation.

    Derivatives are taken of <psi|B|psi> with the unnormalized deformed psi.
    At delta = 0 the value is zero, so neither the 1/M^2 factor nor the norm of
    psi changes the sign structure; the closed forms refer to B itself.
    For lam > 1/2 use the mirrored family (:func:`swap_copies`), since
    f(lam, psi) = f(1 - lam, swap(psi)).
    """
    if not 0 < lam <= 0.5:
        raise ValueError(f"lambda must lie in (0, 1/2], got {lam}; mirror the family for lam > 1/2")
    op = family_bracket(lam)

    def g(delta):
        v = perturbed_psi_star(delta, t_equals_s=t_equals_s)
        return float(np.vdot(v, op @ v).real)

    eye = np.eye(7) * step
    grad = np.array([(g(eye[a]) - g(-eye[a])) / (2 * step) for a in range(7)])
    hess = np.empty((7, 7))
    for a in range(7):
        for b in range(a, 7):
            ea, eb = eye[a], eye[b]
            val = (g(ea + eb) - g(ea - eb) - g(-ea + eb) + g(-ea - eb)) / (4 * step**2)
            hess[a, b] = hess[b, a] = val
    diag, off = hessian_closed_forms(lam, t_equals_s)
    block = hess[np.ix_([2, 6], [2, 6])]
    return HessianReport(lam, t_equals_s, step, grad, hess, diag, off, det26(lam), float(np.linalg.det(block)))
