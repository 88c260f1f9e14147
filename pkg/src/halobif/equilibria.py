"""Collinear equilibrium points L1, L2, L3."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .params import ModelParams

__all__ = [
    "RootIsolationError",
    "CollinearPoint",
    "euler_polynomial",
    "axis_force",
    "potential_gradient",
    "locate_collinear",
]

_BRACKETS = {1: (0.0, 1.0), 2: (0.0, 1.0), 3: (0.0, 2.0)}
_EPS = 1e-9


class RootIsolationError(RuntimeError):
    """No (or no unique) sign change of the equilibrium condition on the
    admissible interval."""


@dataclass(frozen=True)
class CollinearPoint:
    """A collinear equilibrium.

    ``gamma`` is the distance to the closer primary, ``alpha`` the signed
    offset used by the local scaling (``-1 + gamma`` for L1, ``-1 - gamma``
    for L2, ``gamma`` for L3) and ``X`` the synodic abscissa.
    """

    index: int
    gamma: float
    alpha: float
    X: float
    residual: float = 0.0


def _check_index(j):
    if j not in (1, 2, 3):
        raise ValueError(f"collinear point index must be 1, 2 or 3, got {j!r}")


def euler_polynomial(params: ModelParams, j: int) -> np.ndarray:
    """Coefficients of the generalized Euler septic for ``gamma_j``.

    Returned in increasing powers: ``c[k]`` multiplies ``gamma**k``.
    """
    _check_index(j)
    mu, q, A = params.mu, params.q, params.A
    n2 = params.n2
    if j in (1, 2):
        s = 1.0 if j == 1 else -1.0
        c = [
            -s * 3 * A * mu,
            6 * A * mu,
            -s * (2 * mu + 3 * A * mu),
            4 * mu,
            2 * n2 * mu - 2 * q * mu - 2 * n2 + 2 * q - s * 2 * mu,
            s * (6 * n2 - 4 * n2 * mu),
            2 * n2 * mu - 6 * n2,
            s * 2 * n2,
        ]
    else:
        c = [
            2 * q * mu - 2 * q,
            8 * q * mu - 8 * q,
            2 * n2 * mu - 3 * A * mu + 12 * q * mu - 12 * q - 2 * mu,
            2 * n2 - 8 * q - 4 * mu + 8 * n2 * mu + 8 * q * mu,
            8 * n2 + 2 * q * mu + 12 * n2 * mu - 2 * q - 2 * mu,
            12 * n2 + 8 * n2 * mu,
            8 * n2 + 2 * n2 * mu,
            2 * n2,
        ]
    return np.array(c, dtype=float)


def axis_force(params: ModelParams, X):
    """x-component of the gradient of the effective potential on the
    primaries' axis (``Y = Z = 0``)."""
    mu, q, A, n2 = params.mu, params.q, params.A, params.n2
    d1 = X - mu
    d2 = 1.0 + X - mu
    return (
        n2 * X
        - q * (1 - mu) * d1 / np.abs(d1) ** 3
        - 3 * A * mu * d2 / (2 * np.abs(d2) ** 5)
        - mu * d2 / np.abs(d2) ** 3
    )


def potential_gradient(params: ModelParams, X, Y=0.0, Z=0.0) -> np.ndarray:
    """Full gradient of the effective potential at ``(X, Y, Z)``."""
    mu, q, A, n2 = params.mu, params.q, params.A, params.n2
    r1s = Y * Y + Z * Z + (X - mu) ** 2
    r2s = Y * Y + Z * Z + (1 + X - mu) ** 2
    r1_3 = r1s**1.5
    r2_3, r2_5, r2_7 = r2s**1.5, r2s**2.5, r2s**3.5
    d2 = 1 + X - mu
    gx = (
        n2 * X
        - q * (1 - mu) * (X - mu) / r1_3
        + 15 * A * Z * Z * mu * d2 / (2 * r2_7)
        - 3 * A * d2 * mu / (2 * r2_5)
        - d2 * mu / r2_3
    )
    gy = (
        n2 * Y
        - q * Y * (1 - mu) / r1_3
        + 15 * A * Y * Z * Z * mu / (2 * r2_7)
        - 3 * A * Y * mu / (2 * r2_5)
        - Y * mu / r2_3
    )
    gz = (
        -q * Z * (1 - mu) / r1_3
        + 15 * A * Z**3 * mu / (2 * r2_7)
        - 9 * A * Z * mu / (2 * r2_5)
        - Z * mu / r2_3
    )
    return np.array([gx, gy, gz])


def _abscissa(params, j, gamma):
    if j == 1:
        return gamma + params.mu - 1.0
    if j == 2:
        return -gamma + params.mu - 1.0
    return gamma + params.mu


def _alpha(j, gamma):
    return {1: -1.0 + gamma, 2: -1.0 - gamma, 3: gamma}[j]


def _sign_changes(values):
    s = np.sign(values)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def locate_collinear(params: ModelParams, j: int) -> CollinearPoint:
    """Locate ``L_j`` as the positive root of the axis equilibrium condition.

    The root is bracketed on the admissible ``gamma`` interval, isolated with
    a bracketing solver and polished by Newton steps on the Euler septic.
    """
    _check_index(j)

    def f(g):
        return axis_force(params, _abscissa(params, j, g))

    lo, hi = _BRACKETS[j]
    lo += _EPS
    hi -= _EPS
    if j != 1:
        # L2/L3 intervals are unbounded on one side
        while f(lo) * f(hi) > 0 and hi < 16.0:
            hi *= 2.0
    grid = np.linspace(lo, hi, 2001)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.array([f(g) for g in grid])
    changes = _sign_changes(vals[np.isfinite(vals)])
    if changes == 0 or f(lo) * f(hi) > 0:
        raise RootIsolationError(f"no sign change for L{j} on gamma in ({lo}, {hi})")
    if changes > 1:
        raise RootIsolationError(f"{changes} sign changes for L{j}: root is not unique")

    gamma = brentq(f, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)

    coeffs = euler_polynomial(params, j)
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    for _ in range(3):
        d = dpoly(gamma)
        if d == 0.0:
            break
        step = poly(gamma) / d
        if not abs(step) < 1e-8 * gamma:
            break
        gamma -= step
        if abs(step) <= 1e-16 * gamma:
            break
    scale = np.sum(np.abs(coeffs) * gamma ** np.arange(coeffs.size))
    residual = abs(poly(gamma)) / scale
    X = _abscissa(params, j, gamma)
    grad = potential_gradient(params, X)
    if not np.all(np.abs(grad) <= 1e-10 * max(1.0, abs(X))):
        raise RootIsolationError(f"gradient does not vanish at L{j}: {grad}")
    return CollinearPoint(index=j, gamma=float(gamma), alpha=float(_alpha(j, gamma)), X=float(X), residual=float(residual))
