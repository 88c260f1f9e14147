"""Linear stability at L1/L2 and the symplectic normalization of the
quadratic Hamiltonian.

The quadratic part of the local Hamiltonian is

    H2 = (px^2 + py^2 + pz^2)/2 + n (y px - x py) + a x^2 + b y^2/2 + c z^2/2

and, with the basis built here, it becomes
``lambda1 x px + omega1/2 (y^2 + py^2) + omega2/2 (z^2 + pz^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import CollinearPoint
from .params import ModelParams

__all__ = [
    "UnsupportedPointError",
    "CharacterError",
    "ScalingError",
    "LinearData",
    "SaddleCenterCheck",
    "stability_coeffs",
    "check_saddle_center",
    "frequencies",
    "symplectic_basis",
    "linearize",
    "symplectic_form",
    "planar_matrix",
    "characteristic_polynomial",
]


class UnsupportedPointError(ValueError):
    """Raised for L3, for which the local coefficients are not provided."""


class CharacterError(ArithmeticError):
    """The equilibrium is not of saddle x center x center type."""


class ScalingError(ArithmeticError):
    """Non-positive normalization factor of the symplectic basis."""


def symplectic_form(dof: int) -> np.ndarray:
    """Canonical ``J`` for coordinates ordered ``(q_1..q_d, p_1..p_d)``."""
    I = np.eye(dof)
    Z = np.zeros((dof, dof))
    return np.block([[Z, I], [-I, Z]])


@dataclass(frozen=True)
class SaddleCenterCheck:
    """Outcome of the saddle x center x center test.

    Truthy iff all three conditions hold.  ``sufficient`` records the simpler
    sufficient condition ``b > n**2``.
    """

    conditions: tuple[bool, bool, bool]
    sufficient: bool

    def __bool__(self):
        return all(self.conditions)


@dataclass(frozen=True)
class LinearData:
    """Linearization data at L1 or L2.

    ``C`` maps normalized coordinates to the scaled local coordinates,
    ``old = C @ new``, both ordered ``(x, y, z, px, py, pz)``.
    ``C4`` is its planar block in the ordering ``(x, y, px, py)``.
    """

    a: float
    b: float
    c: float
    Delta: float
    n: float
    eta1: float
    eta2: float
    lambda1: float
    omega1: float
    omega2: float
    d_lambda1: float
    d_omega1: float
    s1: float
    s2: float
    C4: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)

    def symplecticity_error(self) -> float:
        J = symplectic_form(3)
        return float(np.max(np.abs(self.C.T @ J @ self.C - J)))


def stability_coeffs(params: ModelParams, point: CollinearPoint) -> tuple[float, float, float, float]:
    """Second-derivative coefficients ``(a, b, c, Delta)`` at L1 or L2.

    ``a`` and ``c`` are assembled from ``b`` and ``Delta`` so that
    ``a = -(b + Delta)`` and ``c = b + 2 Delta`` hold exactly.
    """
    if point.index not in (1, 2):
        raise UnsupportedPointError(f"local coefficients are only available at L1 and L2, not L{point.index}")
    mu, q, A = params.mu, params.q, params.A
    al = point.alpha
    s = 1.0 if point.index == 1 else -1.0
    b = -q * (1 - mu) / al**3 + s * mu / (1 + al) ** 3 + s * 3 * A * mu / (2 * (1 + al) ** 5)
    Delta = 3 * A * mu / (2 * abs(1 + al) ** 5)
    return -(b + Delta), b, b + 2 * Delta, Delta


def _discriminant(a, b, n2):
    return 16 * a * n2 + 4 * a * a + 8 * b * n2 - 4 * a * b + b * b


def check_saddle_center(a: float, b: float, c: float, n: float) -> SaddleCenterCheck:
    """Test the saddle x center x center inequalities written in terms of
    ``b`` and ``Delta = (c - b)/2``."""
    n2 = n * n
    D = 0.5 * (c - b)
    disc = 9 * b * b + 4 * D * (-4 * n2 + D) + b * (-8 * n2 + 12 * D)
    c1 = disc >= 0.0
    root = math.sqrt(disc) if c1 else float("nan")
    c2 = bool(c1 and b - 2 * n2 + 2 * D + root > 0.0)
    c3 = bool(c1 and b - 2 * n2 + 2 * D - root < 0.0)
    return SaddleCenterCheck(conditions=(bool(c1), c2, c3), sufficient=bool(b > n2))


def characteristic_polynomial(lam, a, b, n):
    """Characteristic polynomial of the planar linear flow."""
    n2 = n * n
    l2 = lam * lam
    return l2 * l2 + (2 * n2 + 2 * a + b) * l2 + (n2 * n2 - 2 * a * n2 - b * n2 + 2 * a * b)


def planar_matrix(a, b, n) -> np.ndarray:
    """``J Hess(H2)`` for the planar block, ordering ``(x, y, px, py)``."""
    return np.array(
        [
            [0.0, n, 1.0, 0.0],
            [-n, 0.0, 0.0, 1.0],
            [-2 * a, 0.0, 0.0, n],
            [0.0, -b, -n, 0.0],
        ]
    )


def frequencies(a: float, b: float, c: float, n: float) -> tuple[float, float, float]:
    """Hyperbolic rate and the two center frequencies ``(lambda1, omega1, omega2)``."""
    n2 = n * n
    disc = _discriminant(a, b, n2)
    if disc < 0:
        raise CharacterError(f"complex squared eigenvalues (discriminant {disc})")
    root = math.sqrt(disc)
    eta1 = 0.5 * (-2 * n2 - 2 * a - b - root)
    eta2 = 0.5 * (-2 * n2 - 2 * a - b + root)
    if not (eta1 < 0.0 < eta2):
        raise CharacterError(f"eta1={eta1}, eta2={eta2}: not saddle x center")
    if not c > 0.0:
        raise CharacterError(f"vertical coefficient c={c} is not positive")
    return math.sqrt(eta2), math.sqrt(-eta1), math.sqrt(c)


def _d_factors(a, b, n, lam, om):
    n2 = n * n
    k = -4 * n2 + 2 * a - b
    rest = -4 * n2 * n2 + b * n2 + 6 * a * n2 - 2 * a * b + 4 * a * a
    d_lam = -2 * lam * (k * lam * lam + rest)
    d_om = -om * (k * om * om - rest)
    return d_lam, d_om


def symplectic_basis(a, b, n, lambda1, omega1, omega2):
    """Symplectic change of basis normalizing the quadratic Hamiltonian.

    Returns ``(C, s1, s2)`` with ``C`` the 6x6 matrix in the ordering
    ``(x, y, z, px, py, pz)``.  Eigenvector components are taken in closed
    form so that their signs are fixed.
    """
    C, s1, s2, _, _, _ = _basis(a, b, n, lambda1, omega1, omega2)
    return C, s1, s2


def _basis(a, b, n, lambda1, omega1, omega2):
    lam, om = lambda1, omega1
    n2 = n * n
    d_lam, d_om = _d_factors(a, b, n, lam, om)
    if not (d_lam > 0.0 and d_om > 0.0):
        raise ScalingError(f"d_lambda1={d_lam}, d_omega1={d_om} must both be positive")
    s1, s2 = math.sqrt(d_lam), math.sqrt(d_om)

    u_lam = np.array([2 * n * lam, lam**2 + 2 * a - n2, n * lam**2 - 2 * a * n + n**3, lam**3 + (2 * a + n2) * lam])
    v_lam = np.array([-2 * n * lam, lam**2 + 2 * a - n2, n * lam**2 - 2 * a * n + n**3, -(lam**3) - (2 * a + n2) * lam])
    u_om = np.array([0.0, -(om**2) + 2 * a - n2, -n * om**2 - 2 * a * n + n**3, 0.0])
    v_om = np.array([2 * n * om, 0.0, 0.0, -(om**3) + (2 * a + n2) * om])

    C4 = np.column_stack([u_lam / s1, u_om / s2, v_lam / s1, v_om / s2])
    C = np.zeros((6, 6))
    planar = [0, 1, 3, 4]  # x, y, px, py inside (x, y, z, px, py, pz)
    C[np.ix_(planar, planar)] = C4
    C[2, 2] = 1.0 / math.sqrt(omega2)
    C[5, 5] = math.sqrt(omega2)
    return C, s1, s2, C4, d_lam, d_om


def linearize(params: ModelParams, point: CollinearPoint) -> LinearData:
    """Assemble :class:`LinearData` for ``point``."""
    a, b, c, Delta = stability_coeffs(params, point)
    n = params.n
    if not check_saddle_center(a, b, c, n):
        raise CharacterError(f"L{point.index} is not of saddle x center x center type")
    lam, om1, om2 = frequencies(a, b, c, n)
    C, s1, s2, C4, d_lam, d_om = _basis(a, b, n, lam, om1, om2)
    return LinearData(
        a=a, b=b, c=c, Delta=Delta, n=n,
        eta1=-om1 * om1, eta2=lam * lam,
        lambda1=lam, omega1=om1, omega2=om2,
        d_lambda1=d_lam, d_omega1=d_om, s1=s1, s2=s2,
        C4=C4, C=C,
    )
