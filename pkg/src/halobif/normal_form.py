"""Resonant normal form at the 1:1 resonance and halo bifurcation thresholds.

The center-manifold Hamiltonian is written in complex variables ``(Q, P)``
with ``y = (Q2 + i P2)/sqrt2``, ``py = (i Q2 + P2)/sqrt2`` (same for
``z, pz``), so that ``Q P = -i I`` with ``y = sqrt(2 I2) sin(theta2)`` and
``py = sqrt(2 I2) cos(theta2)``.  A Lie-series normalization removes every
monomial whose angle combination ``k2 theta2 + k3 theta3`` has
``k2 + k3 != 0``; the surviving quartic part is

    -[a20 I2^2 + a02 I3^2 + I2 I3 (a11 + 2 b11 cos(2 psi))],  psi = theta2 - theta3.

The coefficients are reported with this leading minus sign, which is the
convention under which the threshold formulas below give positive actions.

Frequency naming: ``omega_p`` is the planar frequency (``omega1`` of the
linear data), ``omega_v`` the vertical one (``omega2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .center_manifold import CMHamiltonian, lie_transform
from .expansion import complexification_matrix
from .poly import Series

__all__ = [
    "ResonanceError",
    "DegenerateResonanceError",
    "ResonantCoeffs",
    "Thresholds",
    "resonant_normalize",
    "resonant_coeffs",
    "thresholds",
    "family_classification",
    "normal_form_hamiltonian",
    "FAMILY_MEANING",
]

FAMILY_MEANING = {
    "ly": "loop (halo) family leaves the planar Lyapunov orbit, which turns unstable",
    "iy": "planar Lyapunov orbit regains stability; inclined (anti-halo) family appears",
    "iz": "inclined families collapse on the vertical Lyapunov orbit",
    "lz": "loop family would collapse on the vertical Lyapunov orbit",
}


class ResonanceError(ArithmeticError):
    """Unexpected resonant term (e.g. at degree 3)."""


class DegenerateResonanceError(ZeroDivisionError):
    """Vanishing denominator in a threshold formula."""


@dataclass(frozen=True)
class ResonantCoeffs:
    """Quartic resonant normal-form coefficients and derived quantities."""

    a20: float
    a02: float
    a11: float
    b11: float
    omega_p: float
    omega_v: float

    @property
    def delta(self) -> float:
        return self.omega_p - self.omega_v

    @property
    def hnew(self) -> dict[str, float]:
        """Coefficients of the Hamiltonian in the variables
        ``(E = I2 + I3, R = I2, nu, psi)``, divided by ``omega_v``."""
        w = self.omega_v
        return {
            "delta_tilde": self.delta / w,
            "a": (self.a20 + self.a02 - self.a11) / w,
            "b": self.a02 / w,
            "c": (self.a11 - 2 * self.a02) / w,
            "d": -2 * self.b11 / w,
        }

    def as_tuple(self):
        return (self.a20, self.a02, self.a11, self.b11)


@dataclass(frozen=True)
class Thresholds:
    """Threshold values of ``E = I2 + I3`` and their energy equivalents.

    ``E_*`` follow ``delta * omega_v**2 / denominator``; the energies are
    ``h_* = E_* / omega_v``.
    """

    E_iy: float
    E_iz: float
    E_ly: float
    E_lz: float
    omega_v: float

    @property
    def h_iy(self):
        return self.E_iy / self.omega_v

    @property
    def h_iz(self):
        return self.E_iz / self.omega_v

    @property
    def h_ly(self):
        return self.E_ly / self.omega_v

    @property
    def h_lz(self):
        return self.E_lz / self.omega_v

    def as_dict(self) -> dict[str, float]:
        return {
            "E_iy": self.E_iy, "E_iz": self.E_iz, "E_ly": self.E_ly, "E_lz": self.E_lz,
            "h_iy": self.h_iy, "h_iz": self.h_iz, "h_ly": self.h_ly, "h_lz": self.h_lz,
        }

    def is_halo_sequence(self) -> bool:
        return 0 < self.h_ly < self.h_iy < self.h_iz


def _resonant_mask(exps: np.ndarray) -> np.ndarray:
    # variables (Q2, Q3, P2, P3); angle vector k = a - b
    k = exps[:, :2] - exps[:, 2:]
    return k.sum(axis=1) == 0


def resonant_normalize(cm: CMHamiltonian, N: int = 4, tol: float = 1e-12):
    """Normalize the center-manifold Hamiltonian up to degree ``N`` around
    the 1:1 resonance.  Returns the complex normal form and the generators.
    """
    if cm.H.degree < 4 or N < 4:
        raise ValueError("resonant normal form needs the Hamiltonian to degree >= 4")
    N = min(N, cm.H.degree)
    H = cm.H.truncate(N).with_degree(N).substitute_linear(complexification_matrix(2))
    eta = np.array([1j * cm.omega1, 1j * cm.omega2])
    scale = max(1.0, H.homogeneous(2).max_abs())
    # y**2 and py**2 coefficients agree only to rounding; drop the residue
    off = (H.degrees() == 2) & ~_resonant_mask(H.exps)
    if np.max(np.abs(H.coefs[off]), initial=0.0) > 1e-12 * scale:
        raise ResonanceError("quadratic part is not in harmonic form")
    H = H.select(~off)
    gens = []
    for k in range(3, N + 1):
        Hk = H.homogeneous(k)
        res = _resonant_mask(Hk.exps)
        if k % 2 and len(Hk) and np.max(np.abs(Hk.coefs[res]), initial=0.0) > tol * scale:
            raise ResonanceError(f"degree-{k} resonant term survives")
        sel = ~res
        if not np.any(sel):
            gens.append(Series(4, N))
            continue
        exps = Hk.exps[sel]
        div = (exps[:, 2:] - exps[:, :2]) @ eta
        G = Series(4, N, exps, -Hk.coefs[sel] / div)
        H = lie_transform(H, G)
        gens.append(G)
        left = H.homogeneous(k)
        if np.max(np.abs(left.coefs[~_resonant_mask(left.exps)]), initial=0.0) > 1e-11 * scale:
            raise ResonanceError(f"degree {k} not normalized")
    return H, tuple(gens)


def resonant_coeffs(cm: CMHamiltonian) -> ResonantCoeffs:
    """Quartic coefficients ``(a20, a02, a11, b11)`` of the resonant normal form.

    The degree-3 part has no resonant terms and contributes only through
    the Lie-series correction at degree 4.
    """
    Z, _ = resonant_normalize(cm, 4)
    Z4 = Z.homogeneous(4)
    c = {e: v for e, v in Z4}

    def get(e):
        return complex(c.get(e, 0.0))

    h2020, h0202, h1111 = get((2, 0, 2, 0)), get((0, 2, 0, 2)), get((1, 1, 1, 1))
    hc1, hc2 = get((2, 0, 0, 2)), get((0, 2, 2, 0))
    level = max(1.0, Z4.max_abs())
    for v in (h2020, h0202, h1111):
        if abs(v.imag) > 1e-10 * level:
            raise ResonanceError(f"complex action coefficient {v}")
    if abs(hc1 - np.conj(hc2)) > 1e-10 * level or abs(hc1.imag) > 1e-10 * level:
        raise ResonanceError(f"resonant pair not real and symmetric: {hc1}, {hc2}")
    # (Q P)^2 = -I^2 and Q2^2 P3^2 + Q3^2 P2^2 = -2 I2 I3 cos(2 psi) for a real pair
    return ResonantCoeffs(
        a20=h2020.real,
        a02=h0202.real,
        a11=h1111.real,
        b11=hc1.real,
        omega_p=cm.omega1,
        omega_v=cm.omega2,
    )


def normal_form_hamiltonian(rc: ResonantCoeffs):
    """Callable ``H(I2, I3, theta2, theta3)`` of the truncated normal form."""

    def H(I2, I3, th2, th3):
        quart = rc.a20 * I2**2 + rc.a02 * I3**2 + I2 * I3 * (rc.a11 + 2 * rc.b11 * np.cos(2 * (th2 - th3)))
        return rc.omega_p * I2 + rc.omega_v * I3 - quart

    return H


def _div(num, den, name):
    if abs(den) < 1e-14:
        raise DegenerateResonanceError(f"denominator of E_{name} vanishes ({den:.3e})")
    return num / den


def thresholds(rc: ResonantCoeffs) -> Thresholds:
    """First-order (in the detuning) thresholds of the resonant families."""
    num = rc.delta * rc.omega_v**2
    a20, a02, a11, b11 = rc.a20, rc.a02, rc.a11, rc.b11
    return Thresholds(
        E_iy=_div(num, -a11 + 2 * (a20 - b11), "iy"),
        E_iz=_div(num, -2 * a02 + a11 + 2 * b11, "iz"),
        E_ly=_div(num, -a11 + 2 * (a20 + b11), "ly"),
        E_lz=_div(num, -2 * a02 - a11 + 2 * b11, "lz"),
        omega_v=rc.omega_v,
    )


def family_classification(psi: float, atol: float = 1e-9) -> str:
    """``'inclined'`` for ``psi`` in {0, pi}, ``'loop'`` for {pi/2, 3pi/2}."""
    p = math.fmod(psi, 2 * math.pi)
    if p < 0:
        p += 2 * math.pi
    for ref, kind in ((0.0, "inclined"), (math.pi, "inclined"), (2 * math.pi, "inclined"),
                      (0.5 * math.pi, "loop"), (1.5 * math.pi, "loop")):
        if abs(p - ref) <= atol:
            return kind
    raise ValueError(f"psi={psi} is not a critical angle")
