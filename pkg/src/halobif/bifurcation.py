"""Normal-mode periodic orbits of the center-manifold flow and their stability.

The planar Lyapunov orbit lives in the invariant plane ``z = pz = 0`` and is
the energy contour of a one-degree-of-freedom Hamiltonian.  The vertical
Lyapunov orbit is not confined to ``y = py = 0`` (the cubic terms couple
``z**2`` to ``py``), so it is computed as a fixed point of the section map
``z = 0, pz > 0``.  Stability is measured by ``k = (tr M - 2) / 2`` with
``M`` the 4x4 monodromy matrix; the two trivial multipliers of a periodic
orbit contribute the ``-2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect, brentq

from .dynamics import CMField, OutsideShellError, _as_field, integrate_cm, solve_pz

__all__ = [
    "PeriodicOrbit",
    "Crossing",
    "ScanResult",
    "FixedPoint",
    "planar_lyapunov",
    "section_map",
    "section_jacobian",
    "section_extent",
    "vertical_lyapunov",
    "section_fixed_points",
    "stability_index",
    "bifurcation_scan",
]


@dataclass(frozen=True)
class PeriodicOrbit:
    state: np.ndarray
    period: float
    monodromy: np.ndarray = field(repr=False)
    h: float = math.nan

    @property
    def index(self) -> float:
        return stability_index(self.monodromy)

    @property
    def stable(self) -> bool:
        return abs(self.index) < 1.0


@dataclass(frozen=True)
class FixedPoint:
    """Fixed point of the section map, classified by the trace of its Jacobian."""

    y: float
    py: float
    period: float
    index: float

    @property
    def kind(self) -> str:
        return "elliptic" if abs(self.index) < 1.0 else "hyperbolic"


@dataclass(frozen=True)
class Crossing:
    h: float
    level: int  # +1 or -1
    destabilizing: bool


@dataclass
class ScanResult:
    family: str
    h: np.ndarray
    index: np.ndarray
    crossings: list[Crossing]

    @property
    def found(self) -> bool:
        return bool(self.crossings)

    def first(self, level: int | None = None) -> Crossing | None:
        for c in self.crossings:
            if level is None or c.level == level:
                return c
        return None


def stability_index(M: np.ndarray) -> float:
    """``(trace(M) - 2) / 2`` for a 4x4 monodromy matrix (``trace / 2`` for 2x2)."""
    M = np.asarray(M)
    if M.shape == (2, 2):
        return float(np.trace(M) / 2)
    return float((np.trace(M) - 2.0) / 2.0)


def _planar_py(fld: CMField, h: float) -> float:
    def g(p):
        return fld._energy(0.0, 0.0, p, 0.0) - h

    grid = np.linspace(0.0, fld.escape_radius, 20001)
    v = g(grid)
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) <= 0)[0]
    idx = idx[grid[idx + 1] > 0]
    if idx.size == 0 or h <= 0:
        raise OutsideShellError(f"no planar orbit at energy {h}")
    i = idx[0]
    return brentq(g, grid[i], grid[i + 1], xtol=1e-16, rtol=4 * np.finfo(float).eps)


def planar_lyapunov(cm, h: float, tol: float = 1e-12) -> PeriodicOrbit:
    """Planar Lyapunov orbit at energy ``h`` started on ``y = 0`` with ``py > 0``."""
    fld = _as_field(cm)
    py = _planar_py(fld, h)
    x0 = np.array([0.0, 0.0, py, 0.0])
    T_lin = 2 * np.pi / fld.omega_y

    def ycross(t, s):
        return s[0]

    ycross.direction = 1.0
    tr = integrate_cm(fld, x0, 2 * T_lin, tol=tol, events=[ycross])
    ev = tr.events[0][tr.events[0] > 0.25 * T_lin]
    if not len(ev):
        raise ArithmeticError(f"planar orbit at h={h} did not close")
    T = float(ev[0])
    tr = integrate_cm(fld, x0, T, tol=tol, monodromy=True)
    return PeriodicOrbit(state=x0, period=T, monodromy=tr.tangent[-1], h=h)


def section_map(cm, h: float, y: float, py: float, tol: float = 1e-12, monodromy: bool = False):
    """First return to ``z = 0, pz > 0`` from ``(y, py)`` on the energy shell.

    Returns ``(y1, py1, tau)`` or, with ``monodromy``, ``(y1, py1, tau, M)``.
    """
    fld = _as_field(cm)
    pz = solve_pz(fld, h, y, py)
    x0 = np.array([y, 0.0, py, pz])

    def zcross(t, s):
        return s[1]

    zcross.direction = 1.0
    T_lin = 2 * np.pi / fld.omega_z
    tr = integrate_cm(fld, x0, 2 * T_lin, tol=tol, events=[zcross], monodromy=monodromy)
    keep = np.nonzero(tr.events[0] > 0.25 * T_lin)[0]
    if not len(keep):
        raise ArithmeticError(f"no return to the section from ({y}, {py})")
    tau = float(tr.events[0][keep[0]])
    s = tr.event_states[0][keep[0]]
    if monodromy:
        return float(s[0]), float(s[2]), tau, s[4:].reshape(4, 4)
    return float(s[0]), float(s[2]), tau


def section_jacobian(cm, h, y, py, eps=1e-6, tol=1e-12):
    """Central-difference Jacobian of the section map in ``(y, py)``."""
    J = np.empty((2, 2))
    for j, (dy, dp) in enumerate(((eps, 0.0), (0.0, eps))):
        a = section_map(cm, h, y + dy, py + dp, tol)
        b = section_map(cm, h, y - dy, py - dp, tol)
        J[0, j] = (a[0] - b[0]) / (2 * eps)
        J[1, j] = (a[1] - b[1]) / (2 * eps)
    return J


def section_extent(cm, h: float) -> tuple[float, float, float, float]:
    """Extent of the section on its axes: ``(y_min, y_max, py_min, py_max)``
    where ``pz`` vanishes along ``py = 0`` and ``y = 0`` respectively."""
    fld = _as_field(cm)

    def edge(f, sign):
        grid = sign * np.linspace(0.0, fld.escape_radius, 20001)
        v = f(grid) - h
        idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) <= 0)[0]
        idx = idx[np.abs(grid[idx + 1]) > 0]
        if idx.size == 0:
            raise OutsideShellError(f"empty section at h={h}")
        i = idx[0]
        return brentq(lambda s: f(s) - h, grid[i], grid[i + 1], xtol=1e-15)

    fy = lambda s: fld._energy(s, 0.0, 0.0, 0.0)  # noqa: E731
    fp = lambda s: fld._energy(0.0, 0.0, s, 0.0)  # noqa: E731
    return edge(fy, -1), edge(fy, 1), edge(fp, -1), edge(fp, 1)


def _newton_fixed_point(cm, h, y, py, tol, maxit=30, eps=1e-6):
    for _ in range(maxit):
        y1, p1, tau = section_map(cm, h, y, py, tol)
        F = np.array([y1 - y, p1 - py])
        if np.max(np.abs(F)) < 1e-11:
            return y, py, tau
        J = section_jacobian(cm, h, y, py, eps, tol) - np.eye(2)
        d = np.linalg.solve(J, -F)
        lam = 1.0
        while lam > 1e-3:
            try:
                section_map(cm, h, y + lam * d[0], py + lam * d[1], tol)
                break
            except (OutsideShellError, ArithmeticError):
                lam *= 0.5
        y, py = y + lam * d[0], py + lam * d[1]
    raise ArithmeticError("Newton iteration on the section did not converge")


def vertical_lyapunov(cm, h: float, guess=(0.0, 0.0), tol: float = 1e-12) -> PeriodicOrbit:
    """Vertical Lyapunov orbit as the central fixed point of the section map."""
    fld = _as_field(cm)
    y, py, _ = _newton_fixed_point(fld, h, guess[0], guess[1], tol)
    y1, p1, tau, M = section_map(fld, h, y, py, tol, monodromy=True)
    x0 = np.array([y, 0.0, py, solve_pz(fld, h, y, py)])
    return PeriodicOrbit(state=x0, period=tau, monodromy=M, h=h)


def section_fixed_points(cm, h: float, seeds=None, tol: float = 1e-12, dedupe: float = 1e-6) -> list[FixedPoint]:
    """Fixed points of the section map found by Newton from seeds on the
    section axes (``py = 0`` and ``y = 0``), where the symmetric orbits sit."""
    fld = _as_field(cm)
    if seeds is None:
        ymin, ymax, pmin, pmax = section_extent(fld, h)
        fr = (0.2, 0.4, 0.6, 0.8, 0.95)
        seeds = [(0.0, 0.0)]
        seeds += [(f * ymax, 0.0) for f in fr] + [(f * ymin, 0.0) for f in fr]
        seeds += [(0.0, f * pmax) for f in fr] + [(0.0, f * pmin) for f in fr]
    found: list[FixedPoint] = []
    for y0, p0 in seeds:
        try:
            y, py, tau = _newton_fixed_point(fld, h, y0, p0, tol)
        except (ArithmeticError, OutsideShellError, np.linalg.LinAlgError):
            continue
        if any(abs(f.y - y) < dedupe and abs(f.py - py) < dedupe for f in found):
            continue
        try:
            J = section_jacobian(fld, h, y, py, 1e-6, tol)
        except (ArithmeticError, OutsideShellError):
            continue
        found.append(FixedPoint(y=float(y), py=float(py), period=float(tau), index=float(np.trace(J) / 2)))
    found.sort(key=lambda f: (round(f.y, 8), round(f.py, 8)))
    return found


def bifurcation_scan(cm, h_range, step: float, family: str = "planar", tol: float = 1e-12,
                     xtol: float = 1e-5) -> ScanResult:
    """Scan the stability index of a normal-mode family over energies.

    Crossings of ``k = +1`` or ``k = -1`` between grid points are refined
    by bisection to ``xtol`` in ``h``.
    """
    fld = _as_field(cm)
    h0, h1 = map(float, h_range)
    if not (0 < h0 < h1) or step <= 0:
        raise ValueError("need 0 < h_min < h_max and a positive step")
    hs = np.arange(h0, h1 + 0.5 * step, step)
    guess = [(0.0, 0.0)]

    def index_at(h):
        if family == "planar":
            return planar_lyapunov(fld, h, tol).index
        if family == "vertical":
            orb = vertical_lyapunov(fld, h, guess[0], tol)
            guess[0] = (orb.state[0], orb.state[2])
            return orb.index
        raise ValueError(f"unknown family {family!r}")

    ks = np.array([index_at(h) for h in hs])
    crossings = []
    for i in range(len(hs) - 1):
        for level in (1, -1):
            a, b = ks[i] - level, ks[i + 1] - level
            if a == 0.0 or a * b < 0:
                if family == "vertical":
                    guess[0] = _seed_between(fld, hs[i], tol)
                hc = bisect(lambda h: index_at(h) - level, hs[i], hs[i + 1], xtol=xtol)
                destab = abs(ks[i + 1]) > abs(ks[i])
                crossings.append(Crossing(h=float(hc), level=level, destabilizing=bool(destab)))
    return ScanResult(family=family, h=hs, index=ks, crossings=crossings)


def _seed_between(fld, h, tol):
    try:
        orb = vertical_lyapunov(fld, h, (0.0, 0.0), tol)
        return orb.state[0], orb.state[2]
    except (ArithmeticError, OutsideShellError):
        return 0.0, 0.0
