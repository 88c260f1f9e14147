"""Taylor expansion of the Hamiltonian about L1/L2 and its diagonal complex form.

The synodic coordinates are shifted to the equilibrium and scaled by its
distance ``gamma`` to the closer primary,

    X = -gamma x + mu + alpha,   Y = -gamma y,   Z = gamma z,

which is symplectic with multiplier ``gamma**2``; the Hamiltonian is divided
by ``gamma**2``.  Inverse distances are expanded with Gegenbauer recurrences:
``r**(-k) = |D|**(-k) sum_m s**m T_m`` with ``s = gamma / D`` and
``T_m = rho**m C_m^(k/2)(x / rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .equilibria import CollinearPoint
from .linear import LinearData, UnsupportedPointError, linearize
from .params import ModelParams
from .poly import MAX_DEGREE, Series

__all__ = [
    "BasisMismatchError",
    "Stage",
    "ExpandedHamiltonian",
    "gegenbauer_terms",
    "expand_hamiltonian",
    "complexification_matrix",
    "realification_matrix",
    "diagonalize_and_complexify",
    "synodic_hamiltonian",
]

NV = 6
# variable order: x, y, z, px, py, pz
X, Y, Z, PX, PY, PZ = range(6)


class BasisMismatchError(ArithmeticError):
    """The transformed quadratic part is not in diagonal form."""


@dataclass(frozen=True)
class Stage:
    """One recorded change of variables ``old = matrix @ new`` (``matrix`` is
    ``None`` for the non-linear shift/scale stage)."""

    name: str
    matrix: np.ndarray | None = field(default=None, repr=False)
    note: str = ""


@dataclass(frozen=True)
class ExpandedHamiltonian:
    """Truncated local Hamiltonian together with its transformation log."""

    params: ModelParams
    point: CollinearPoint
    N: int
    H: Series
    stages: tuple[Stage, ...] = ()

    @property
    def is_complex(self) -> bool:
        return any(s.name == "complexify" for s in self.stages)

    def undo(self, name: str) -> "ExpandedHamiltonian":
        """Invert the most recent stage, which must be called ``name``."""
        if not self.stages or self.stages[-1].name != name:
            raise ValueError(f"last stage is not {name!r}")
        M = self.stages[-1].matrix
        H = self.H.substitute_linear(np.linalg.inv(M))
        if name == "complexify":
            H = H.realify(1e-10)
        return replace(self, H=H, stages=self.stages[:-1])


def gegenbauer_terms(lam: float, N: int, nvars: int = NV, degree: int | None = None) -> list[Series]:
    """Homogeneous polynomials ``rho**m C_m^lam(x/rho)`` for ``m = 0..N`` in
    the position variables ``(x, y, z)`` (indices 0, 1, 2)."""
    degree = N if degree is None else degree
    x = Series.variable(nvars, degree, 0)
    rho2 = Series(nvars, degree, np.eye(nvars, dtype=np.int64)[:3] * 2, [1.0, 1.0, 1.0])
    T = [Series.constant(nvars, degree, 1.0)]
    if N >= 1:
        T.append(x.scale(2 * lam))
    for m in range(2, N + 1):
        T.append((x * T[m - 1]).scale(2 * (m + lam - 1) / m) - (rho2 * T[m - 2]).scale((m + 2 * lam - 2) / m))
    return T


def _inverse_power(D: float, gamma: float, k: int, N: int, degree: int) -> Series:
    """Expansion of ``r**(-k)`` with ``r = |D| |e - (gamma/D) rho|``."""
    s = gamma / D
    T = gegenbauer_terms(k / 2.0, N, degree=degree)
    out = Series(NV, degree)
    for m, t in enumerate(T):
        out = out + t.scale(s**m)
    return out.scale(abs(D) ** (-k))


def synodic_hamiltonian(params: ModelParams, state) -> float:
    """Exact Hamiltonian in synodic coordinates ``(X, Y, Z, PX, PY, PZ)``."""
    Xs, Ys, Zs, PXs, PYs, PZs = state
    mu, q, A, n = params.mu, params.q, params.A, params.n
    r1 = math.sqrt((Xs - mu) ** 2 + Ys**2 + Zs**2)
    r2 = math.sqrt((Xs - mu + 1) ** 2 + Ys**2 + Zs**2)
    return (
        0.5 * (PXs**2 + PYs**2 + PZs**2)
        + n * Ys * PXs
        - n * Xs * PYs
        - q * (1 - mu) / r1
        - mu / r2 * (1 + A / (2 * r2**2) * (1 - 3 * Zs**2 / r2**2))
    )


def local_to_synodic(params: ModelParams, point: CollinearPoint, local) -> np.ndarray:
    """Map scaled local coordinates ``(x, y, z, px, py, pz)`` to synodic ones."""
    g = point.gamma
    XL = params.mu + point.alpha
    x, y, z, px, py, pz = local
    return np.array([-g * x + XL, -g * y, g * z, -g * px, -g * py + params.n * XL, g * pz])


def expand_hamiltonian(params: ModelParams, point: CollinearPoint, N: int = 4) -> ExpandedHamiltonian:
    """Expand the shifted, scaled Hamiltonian to total degree ``N``.

    The constant term is dropped and the linear term is checked to vanish
    (equilibrium condition) before being discarded.
    """
    if point.index not in (1, 2):
        raise UnsupportedPointError(f"expansion is only available about L1 and L2, not L{point.index}")
    if not 2 <= N <= MAX_DEGREE:
        raise ValueError(f"truncation degree must lie in [2, {MAX_DEGREE}], got {N}")
    mu, q, A, n = params.mu, params.q, params.A, params.n
    g = point.gamma
    XL = mu + point.alpha
    D1 = XL - mu
    D2 = XL - mu + 1.0
    eye = np.eye(NV, dtype=np.int64)

    kinetic = Series(
        NV, N,
        np.array([2 * eye[PX], 2 * eye[PY], 2 * eye[PZ], eye[Y] + eye[PX], eye[X] + eye[PY], eye[X]]),
        [0.5, 0.5, 0.5, n, -n, n * n * XL / g],
    )
    U = _inverse_power(D1, g, 1, N, N).scale(q * (1 - mu))
    U = U + _inverse_power(D2, g, 1, N, N).scale(mu)
    if A != 0.0:
        U = U + _inverse_power(D2, g, 3, N, N).scale(0.5 * mu * A)
        z2 = Series.monomial(NV, N, 2 * eye[Z])
        r5 = _inverse_power(D2, g, 5, max(N - 2, 0), N)
        U = U - (z2 * r5).scale(1.5 * mu * A * g * g)
    H = kinetic - U.scale(1.0 / (g * g))

    lin = H.homogeneous(1)
    scale = max(1.0, float(np.max(np.abs(H.homogeneous(2).coefs))))
    if lin.max_abs() > 1e-10 * scale:
        raise ArithmeticError(f"gradient at L{point.index} does not vanish: {lin.to_dict()}")
    H = H.select(H.degrees() >= 2)
    stage = Stage("shift-scale", None, f"X = -gamma x + mu + alpha, gamma = {g!r}; Hamiltonian divided by gamma**2")
    return ExpandedHamiltonian(params=params, point=point, N=N, H=H, stages=(stage,))


def complexification_matrix(dof: int = 3) -> np.ndarray:
    """``old = K @ new`` with ``x = q1, px = p1`` and, for the elliptic
    pairs, ``y = (q + i p)/sqrt(2)``, ``py = (i q + p)/sqrt(2)``.

    Pairs ``2..dof`` are complexified; for ``dof=2`` (center-manifold phase)
    every pair is elliptic.
    """
    K = np.zeros((2 * dof, 2 * dof), dtype=complex)
    r = 1.0 / math.sqrt(2.0)
    first = 1 if dof == 3 else 0
    for j in range(dof):
        if j < first:
            K[j, j] = 1.0
            K[j + dof, j + dof] = 1.0
        else:
            K[j, j] = r
            K[j, j + dof] = 1j * r
            K[j + dof, j] = 1j * r
            K[j + dof, j + dof] = r
    return K


def realification_matrix(dof: int = 2) -> np.ndarray:
    """Inverse of :func:`complexification_matrix`: ``q = (y - i py)/sqrt(2)``,
    ``p = (py - i y)/sqrt(2)``."""
    return np.linalg.inv(complexification_matrix(dof)).round(15)


def diagonalize_and_complexify(exp: ExpandedHamiltonian, lin: LinearData | None = None, tol: float = 1e-8) -> ExpandedHamiltonian:
    """Apply the symplectic basis of ``lin`` and the complex substitution.

    The quadratic part becomes ``lambda1 q1 p1 + i omega1 q2 p2 + i omega2 q3 p3``.
    """
    if exp.is_complex:
        raise ValueError("expansion is already complexified")
    if lin is None:
        lin = linearize(exp.params, exp.point)
    H = exp.H.substitute_linear(lin.C)
    K = complexification_matrix(3)
    Hc = H.substitute_linear(K)
    expected = diagonal_quadratic(exp.N, lin.lambda1, lin.omega1, lin.omega2)
    err = (Hc.homogeneous(2) - expected).max_abs()
    if err > tol * max(1.0, lin.lambda1, lin.omega1):
        raise BasisMismatchError(f"quadratic part deviates from diagonal form by {err:.3e}")
    stages = exp.stages + (
        Stage("symplectic-basis", lin.C, "eigenvector basis scaled by s1, s2; vertical pair by 1/sqrt(omega2), sqrt(omega2)"),
        Stage("complexify", K, "y = (q2 + i p2)/sqrt2, py = (i q2 + p2)/sqrt2, same for z"),
    )
    return replace(exp, H=Hc, stages=stages)


def diagonal_quadratic(N: int, lambda1: float, omega1: float, omega2: float) -> Series:
    eye = np.eye(NV, dtype=np.int64)
    return Series(
        NV, N,
        np.array([eye[0] + eye[3], eye[1] + eye[4], eye[2] + eye[5]]),
        np.array([lambda1, 1j * omega1, 1j * omega2]),
    )
