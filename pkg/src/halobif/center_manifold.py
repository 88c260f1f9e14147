"""Reduction to the center manifold by Lie series.

Starting from the diagonal complex Hamiltonian
``lambda q1 p1 + i omega1 q2 p2 + i omega2 q3 p3 + H3 + ...``, generators
``G_3, ..., G_N`` remove every monomial whose exponents in ``q1`` and ``p1``
differ.  Setting ``q1 = p1 = 0`` and returning to real variables gives a
two-degree-of-freedom polynomial in ``(y, z, py, pz)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .expansion import ExpandedHamiltonian, complexification_matrix, diagonalize_and_complexify
from .linear import LinearData, linearize
from .poly import Series, poisson_bracket

__all__ = [
    "SmallDivisorError",
    "NormalizationError",
    "CMHamiltonian",
    "lie_transform",
    "lie_generating",
    "cm_normalize",
    "restrict_and_realify",
    "center_manifold",
]


class SmallDivisorError(ArithmeticError):
    """A homological divisor is smaller than half the hyperbolic rate."""


class NormalizationError(ArithmeticError):
    """A degree could not be brought to the requested form."""


@dataclass(frozen=True)
class CMHamiltonian:
    """Center-manifold Hamiltonian in ``(y, z, py, pz)``.

    ``generators`` holds the complex generators ``G_3 .. G_N`` in the
    six variables ``(q1, q2, q3, p1, p2, p3)``; ``residuals`` the largest
    surviving ``q1``/``p1``-unbalanced coefficient at each degree.
    """

    omega1: float
    omega2: float
    H: Series
    N: int
    generators: tuple[Series, ...] = field(default=(), repr=False)
    residuals: dict = field(default_factory=dict, repr=False)
    divisors_min: float = math.inf
    lambda1: float = math.nan

    @property
    def remainder_degree(self) -> int:
        return self.N + 1

    def quadratic(self) -> Series:
        return self.H.homogeneous(2)

    def coefficient(self, k1, k2, k3, k4) -> float:
        return self.H[(k1, k2, k3, k4)]

    def quadratic_only(self) -> "CMHamiltonian":
        """Same frequencies with every nonlinear term removed."""
        return CMHamiltonian(self.omega1, self.omega2, self.H.homogeneous(2), self.N, lambda1=self.lambda1)

    def scaled_nonlinear(self, factor: float, degrees=(4,)) -> "CMHamiltonian":
        """Copy with the homogeneous parts listed in ``degrees`` multiplied by ``factor``."""
        deg = self.H.degrees()
        coefs = self.H.coefs.copy()
        for k in degrees:
            coefs[deg == k] *= factor
        H = Series(self.H.nvars, self.H.degree, self.H.exps, coefs)
        return CMHamiltonian(self.omega1, self.omega2, H, self.N, lambda1=self.lambda1)


def lie_transform(H: Series, G: Series) -> Series:
    """``exp(L_G) H = H + {H, G} + {{H, G}, G}/2! + ...`` truncated at the
    degree of ``H``.  ``G`` must have no terms of degree below 3."""
    if len(G) and G.degrees().min() < 3:
        raise ValueError("generator must start at degree 3")
    out = H
    term = H
    k = 1
    while True:
        term = poisson_bracket(term, G).scale(1.0 / k)
        if len(term) == 0:
            break
        out = out + term
        k += 1
    return out


def _divisors(exps: np.ndarray, eta: np.ndarray) -> np.ndarray:
    d = eta.size
    return (exps[:, d:] - exps[:, :d]) @ eta


def lie_generating(Hk: Series, eta, min_divisor: float | None = None) -> Series:
    """Generator removing the monomials of ``Hk`` with unequal ``q1``/``p1``
    exponents: ``g = -h / <k_p - k_q, eta>``.

    Raises :class:`SmallDivisorError` if a divisor has modulus below
    ``min_divisor`` (default: half the hyperbolic rate ``|eta[0]|``).
    """
    eta = np.asarray(eta, dtype=complex)
    d = eta.size
    if Hk.nvars != 2 * d:
        raise ValueError("frequency vector does not match the number of variables")
    if min_divisor is None:
        min_divisor = 0.5 * abs(eta[0])
    sel = Hk.exps[:, 0] != Hk.exps[:, d]
    if not np.any(sel):
        return Series(Hk.nvars, Hk.degree)
    exps = Hk.exps[sel]
    div = _divisors(exps, eta)
    small = np.abs(div) < min_divisor
    if np.any(small):
        raise SmallDivisorError(f"divisor {div[small][0]} below {min_divisor}")
    return Series(Hk.nvars, Hk.degree, exps, -Hk.coefs[sel] / div)


def _unbalanced(Hk: Series) -> Series:
    d = Hk.nvars // 2
    return Hk.select(Hk.exps[:, 0] != Hk.exps[:, d])


def cm_normalize(exp: ExpandedHamiltonian, N: int | None = None, lin: LinearData | None = None, tol: float = 1e-11):
    """Partial normal form killing the ``q1``/``p1``-unbalanced monomials.

    Returns ``(H_normalized, generators, residuals, min_divisor)`` with
    ``H_normalized`` still complex in six variables.
    """
    if lin is None:
        lin = linearize(exp.params, exp.point)
    if not exp.is_complex:
        exp = diagonalize_and_complexify(exp, lin)
    N = exp.N if N is None else N
    if N > exp.N:
        raise ValueError(f"expansion only available to degree {exp.N}")
    H = exp.H.truncate(N).with_degree(N)
    eta = np.array([lin.lambda1, 1j * lin.omega1, 1j * lin.omega2])
    scale = max(1.0, H.homogeneous(2).max_abs())
    gens, residuals = [], {}
    dmin = math.inf
    for k in range(3, N + 1):
        Hk = H.homogeneous(k)
        G = lie_generating(Hk, eta)
        if len(G):
            dmin = min(dmin, float(np.min(np.abs(_divisors(G.exps, eta)))))
            H = lie_transform(H, G)
        gens.append(G)
        res = _unbalanced(H.homogeneous(k)).max_abs()
        residuals[k] = res
        level = max(scale, Hk.max_abs())
        if res > tol * level:
            raise NormalizationError(f"degree {k}: residual {res:.3e} after normalization")
    return H, tuple(gens), residuals, dmin


def restrict_and_realify(H: Series, tol: float = 1e-12) -> Series:
    """Set ``q1 = p1 = 0`` and return to the real variables ``(y, z, py, pz)``."""
    keep = (H.exps[:, 0] == 0) & (H.exps[:, 3] == 0)
    exps = H.exps[keep][:, [1, 2, 4, 5]]
    H4 = Series(4, H.degree, exps, H.coefs[keep])
    R = np.linalg.inv(complexification_matrix(2))
    Hr = H4.substitute_linear(R)
    level = max(1.0, Hr.max_abs())
    return Hr.realify(tol * level)


def center_manifold(exp: ExpandedHamiltonian, N: int | None = None, lin: LinearData | None = None) -> CMHamiltonian:
    """Full reduction: normalization, restriction and realification."""
    if lin is None:
        lin = linearize(exp.params, exp.point)
    Hn, gens, residuals, dmin = cm_normalize(exp, N, lin)
    Hr = restrict_and_realify(Hn)
    cm = CMHamiltonian(
        omega1=lin.omega1, omega2=lin.omega2, H=Hr, N=Hn.degree,
        generators=gens, residuals=residuals, divisors_min=dmin, lambda1=lin.lambda1,
    )
    _check_quadratic(cm)
    return cm


def _check_quadratic(cm: CMHamiltonian, tol: float = 1e-10):
    w1, w2 = cm.omega1 / 2, cm.omega2 / 2
    expected = Series.from_dict(4, cm.N, {(2, 0, 0, 0): w1, (0, 0, 2, 0): w1, (0, 2, 0, 0): w2, (0, 0, 0, 2): w2})
    err = (cm.quadratic() - expected).max_abs()
    if err > tol * max(1.0, w1):
        raise NormalizationError(f"quadratic part off by {err:.3e}")
