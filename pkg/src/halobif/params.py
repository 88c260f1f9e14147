"""Model parameters of the restricted three-body problem with a radiating
primary and an oblate secondary.

A parameter set is the triple ``(mu, beta, A)``: mass ratio, sail performance
and oblateness factor ``J2 * r_e**2`` of the smaller primary.  The radiation
pressure enters through ``q = 1 - beta`` and the oblateness raises the mean
motion to ``n = sqrt(1 + 1.5 A)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from importlib import resources

__all__ = [
    "ParameterError",
    "ModelParams",
    "build_params",
    "sail_performance",
    "load_case",
    "known_cases",
    "mass_ratio",
    "SOLAR_LUMINOSITY",
    "SPEED_OF_LIGHT",
    "GRAVITATIONAL_CONSTANT",
    "SOLAR_MASS",
]

# SI units.
SOLAR_LUMINOSITY = 3.839e26  # W
SPEED_OF_LIGHT = 299_792_458.0  # m / s
GRAVITATIONAL_CONSTANT = 6.67430e-11  # m^3 / (kg s^2)
SOLAR_MASS = 1.98847e30  # kg

MU_MAX = 0.5
BETA_MAX = 0.5
A_MAX = 1e-4


class ParameterError(ValueError):
    """Raised when a model parameter lies outside its admissible range."""

    def __init__(self, field: str, value, message: str):
        super().__init__(f"{field}={value!r}: {message}")
        self.field = field
        self.value = value


@dataclass(frozen=True)
class ModelParams:
    """Immutable parameter set of one primary pair.

    Attributes
    ----------
    mu : float
        Mass ratio, ``0 < mu <= 0.5``.
    beta : float
        Sail performance, ``0 <= beta <= 0.5``.
    A : float
        Oblateness factor of the smaller primary, ``0 <= A <= 1e-4``.
    q : float
        Radiation factor ``1 - beta``.
    n : float
        Mean motion, ``n**2 = 1 + 1.5 A``.
    name : str
        Optional label (case-study name).
    """

    mu: float
    beta: float
    A: float
    q: float
    n: float
    name: str = ""

    def __post_init__(self):
        _check_range("mu", self.mu, 0.0, MU_MAX, open_low=True)
        _check_range("beta", self.beta, 0.0, BETA_MAX)
        _check_range("A", self.A, 0.0, A_MAX)
        if self.q != 1.0 - self.beta:
            raise ParameterError("q", self.q, "must equal 1 - beta")
        if abs(self.n * self.n - 1.0 - 1.5 * self.A) > 4 * 2.3e-16:
            raise ParameterError("n", self.n, "must satisfy n**2 = 1 + 1.5 A")

    @property
    def n2(self) -> float:
        return 1.0 + 1.5 * self.A

    def with_(self, **changes) -> "ModelParams":
        """Return a copy with some of ``mu``, ``beta``, ``A`` replaced."""
        mu = changes.pop("mu", self.mu)
        beta = changes.pop("beta", self.beta)
        A = changes.pop("A", self.A)
        name = changes.pop("name", self.name)
        if changes:
            raise TypeError(f"unknown fields {sorted(changes)}")
        return build_params(mu, beta, A, name=name)


def _check_range(field, value, lo, hi, open_low=False):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ParameterError(field, value, "not a number") from None
    if not math.isfinite(v):
        raise ParameterError(field, value, "not finite")
    bad_low = v <= lo if open_low else v < lo
    if bad_low or v > hi:
        bracket = "(" if open_low else "["
        raise ParameterError(field, value, f"outside {bracket}{lo}, {hi}]")


def build_params(mu: float, beta: float = 0.0, A: float = 0.0, name: str = "") -> ModelParams:
    """Validate ``(mu, beta, A)`` and derive ``q`` and ``n``.

    >>> p = build_params(0.3)
    >>> p.n, p.q
    (1.0, 1.0)
    """
    _check_range("mu", mu, 0.0, MU_MAX, open_low=True)
    _check_range("beta", beta, 0.0, BETA_MAX)
    _check_range("A", A, 0.0, A_MAX)
    mu, beta, A = float(mu), float(beta), float(A)
    return ModelParams(mu=mu, beta=beta, A=A, q=1.0 - beta, n=math.sqrt(1.0 + 1.5 * A), name=name)


def sail_performance(Q: float, B: float) -> float:
    """Ratio of radiation-pressure to solar gravitational acceleration.

    Parameters
    ----------
    Q : float
        One plus the reflectivity of the sail, in ``[1, 2]``.
    B : float
        Mass-to-area ratio of the spacecraft in kg/m^2.
    """
    if not 1.0 <= Q <= 2.0:
        raise ParameterError("Q", Q, "outside [1, 2]")
    if not B > 0.0:
        raise ParameterError("B", B, "mass/area ratio must be positive")
    if math.isinf(B):
        return 0.0
    return SOLAR_LUMINOSITY * Q / (4.0 * math.pi * SPEED_OF_LIGHT * GRAVITATIONAL_CONSTANT * SOLAR_MASS * B)


def _read_cases() -> dict[str, dict[str, float]]:
    text = resources.files("halobif.data").joinpath("systems.csv").read_text(encoding="utf-8")
    rows = csv.DictReader(line for line in text.splitlines() if line and not line.startswith("#"))
    out = {}
    for r in rows:
        rec = {k: float(r[k]) for k in ("mu", "J2", "A", "beta")}
        for k in ("m_small", "m_large"):
            rec[k] = float(r[k]) if r.get(k) else None
        out[r["name"]] = rec
    return out


def mass_ratio(m_small: float, m_large: float) -> float:
    """``mu = m_small / (m_small + m_large)``."""
    if not (m_small > 0 and m_large > 0):
        raise ParameterError("mass", (m_small, m_large), "masses must be positive")
    return m_small / (m_small + m_large)


def known_cases() -> list[str]:
    return sorted(_read_cases())


def load_case(name: str, beta: float | None = None, A: float | None = None,
              mu_from_masses: bool = False) -> ModelParams:
    """Parameters of a shipped case study (``earth-moon``, ``sun-barycenter``,
    ``sun-vesta``); ``beta`` and ``A`` may be overridden.

    With ``mu_from_masses`` the mass ratio is recomputed from the tabulated
    masses of the primaries instead of using its rounded value (only
    available where the masses are listed).
    """
    cases = _read_cases()
    try:
        rec = cases[name]
    except KeyError:
        raise LookupError(f"unknown system {name!r}; known: {', '.join(sorted(cases))}") from None
    mu = rec["mu"]
    if mu_from_masses:
        if rec["m_small"] is None:
            raise LookupError(f"no masses listed for {name!r}")
        mu = mass_ratio(rec["m_small"], rec["m_large"])
    return build_params(
        mu,
        rec["beta"] if beta is None else beta,
        rec["A"] if A is None else A,
        name=name,
    )


def case_j2(name: str) -> float:
    """Tabulated J2 of the smaller primary (informational only)."""
    return _read_cases()[name]["J2"]
