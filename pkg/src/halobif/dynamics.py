"""Flow of the center-manifold Hamiltonian and the diagnostics built on it.

The phase variables are ordered ``(y, z, py, pz)``.  Hamilton's equations
and their variational system are generated once per Hamiltonian as plain
Python source, so the same code runs on floats (single orbits, through
``solve_ivp``) and on numpy arrays (grids of orbits stepped together).

Grids are integrated as one large system with a DOP853 stepper whose error
norm is taken per orbit and maximized, so each orbit is held to the same
local tolerance it would get on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853, solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .center_manifold import CMHamiltonian
from .poly import Series

__all__ = [
    "ESCAPE_RADIUS",
    "FLI_ESCAPED",
    "OutsideShellError",
    "StiffnessError",
    "CMState",
    "SectionPoint",
    "SectionOrbit",
    "FLIRecord",
    "Trajectory",
    "CMField",
    "solve_pz",
    "integrate_cm",
    "poincare_map",
    "rotation_numbers",
    "averaged_coefficients",
    "frequency_map",
    "spectral_frequency",
    "numerical_frequencies",
    "fli",
    "fli_grid",
]

ESCAPE_RADIUS = 10.0
FLI_ESCAPED = math.inf
NAMES = ("y", "z", "py", "pz")
# (i, j) pairs of the upper Hessian triangle, in the order returned by ``hess``
_HESS_IDX = [(i, j) for i in range(4) for j in range(i, 4)]


class OutsideShellError(ValueError):
    """No positive ``pz`` puts the point on the requested energy shell."""


class StiffnessError(ArithmeticError):
    """The integrator could not continue (step size underflow)."""


@dataclass(frozen=True)
class CMState:
    y: float
    z: float
    py: float
    pz: float
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.y, self.z, self.py, self.pz])

    @classmethod
    def from_array(cls, x, t=0.0) -> "CMState":
        return cls(*map(float, x[:4]), t=float(t))


@dataclass(frozen=True)
class SectionPoint:
    """Crossing of ``z = 0`` with ``pz > 0``."""

    y: float
    py: float
    t: float


@dataclass
class SectionOrbit:
    seed: tuple[float, float]
    points: list[SectionPoint] = field(default_factory=list)
    escaped: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([(p.y, p.py, p.t) for p in self.points]).reshape(-1, 3)


@dataclass(frozen=True)
class FLIRecord:
    state: CMState
    tangent: tuple[float, float, float, float]
    T: float
    value: float
    escaped: bool = False


@dataclass
class Trajectory:
    """Output of :func:`integrate_cm`.

    ``states`` has shape ``(len(t), 4)``; ``tangent`` is ``(len(t), 4)``
    for a tangent vector or ``(len(t), 4, 4)`` for the fundamental matrix.
    """

    t: np.ndarray
    states: np.ndarray
    sol: object = field(repr=False)
    tangent: np.ndarray | None = field(default=None, repr=False)
    escaped: bool = False
    events: list = field(default_factory=list, repr=False)
    event_states: list = field(default_factory=list, repr=False)

    def __call__(self, t):
        return self.sol(t)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


# ---------------------------------------------------------------------------
# generated vector field


def _poly_source(p: Series) -> str:
    terms = []
    for e, c in p:
        f = [repr(float(c))]
        for name, k in zip(NAMES, e):
            if k == 1:
                f.append(name)
            elif k > 1:
                f.append(f"{name}**{k}")
        terms.append("*".join(f))
    return " + ".join(terms) if terms else "0.0"


class CMField:
    """Hamilton's equations of a real polynomial ``H(y, z, py, pz)``.

    Parameters
    ----------
    H : Series or CMHamiltonian
        Real polynomial in four variables.
    escape_radius : float
        Orbits whose Euclidean norm exceeds this value are stopped.
    """

    def __init__(self, H, escape_radius: float = ESCAPE_RADIUS):
        if isinstance(H, CMHamiltonian):
            H = H.H
        if H.nvars != 4:
            raise ValueError("expected a polynomial in (y, z, py, pz)")
        if H.is_complex and H.max_imag() > 0:
            raise ValueError("the Hamiltonian must be real")
        H = H.real() if H.is_complex else H
        self.H = H
        self.escape_radius = float(escape_radius)
        grad = [H.derivative(i) for i in range(4)]
        hess = [grad[i].derivative(j) for i, j in _HESS_IDX]
        args = ", ".join(NAMES)
        g = [_poly_source(d) for d in grad]
        src = (
            f"def energy({args}):\n    return {_poly_source(H)}\n"
            f"def flow({args}):\n    return ({g[2]}, {g[3]}, -({g[0]}), -({g[1]}))\n"
            f"def hess({args}):\n    return ({', '.join(_poly_source(h) for h in hess)},)\n"
        )
        ns: dict = {}
        exec(compile(src, "<cm-field>", "exec"), ns)
        self._energy, self._flow, self._hess = ns["energy"], ns["flow"], ns["hess"]
        self.source = src
        self.omega_y = 2 * float(H[(2, 0, 0, 0)].real)
        self.omega_z = 2 * float(H[(0, 2, 0, 0)].real)

    # -- evaluation -------------------------------------------------------
    def energy(self, x):
        x = np.asarray(x, dtype=float)
        return self._energy(x[..., 0], x[..., 1], x[..., 2], x[..., 3])

    def vector(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.stack(np.broadcast_arrays(*self._flow(x[..., 0], x[..., 1], x[..., 2], x[..., 3])), axis=-1)

    def jacobian(self, x) -> np.ndarray:
        """``J Hess H`` at a single point."""
        h = self._hess(*map(float, np.asarray(x, dtype=float)[:4]))
        S = np.zeros((4, 4))
        for (i, j), v in zip(_HESS_IDX, h):
            S[i, j] = S[j, i] = v
        return np.vstack([S[2:], -S[:2]])

    @staticmethod
    def _apply(hs, e0, e1, e2, e3):
        hyy, hyz, hypy, hypz, hzz, hzpy, hzpz, hpypy, hpypz, hpzpz = hs
        gy = hyy * e0 + hyz * e1 + hypy * e2 + hypz * e3
        gz = hyz * e0 + hzz * e1 + hzpy * e2 + hzpz * e3
        gpy = hypy * e0 + hzpy * e1 + hpypy * e2 + hpypz * e3
        gpz = hypz * e0 + hzpz * e1 + hpypz * e2 + hpzpz * e3
        return gpy, gpz, -gy, -gz

    # -- right-hand sides for solve_ivp (single orbit) -----------------------
    def rhs(self, t, s):
        return np.array(self._flow(*s.tolist()))

    def rhs_tangent(self, t, s):
        v = s.tolist()
        x = v[:4]
        return np.array(self._flow(*x) + self._apply(self._hess(*x), *v[4:8]))

    def rhs_matrix(self, t, s):
        v = s.tolist()
        x = v[:4]
        hs = self._hess(*x)
        out = list(self._flow(*x))
        P = s[4:].reshape(4, 4)
        d = np.array(self._apply(hs, P[0], P[1], P[2], P[3]))
        return np.concatenate([out, d.ravel()])

    # -- batched right-hand side ---------------------------------------------
    def batch_rhs(self, k: int, active: np.ndarray):
        """Right-hand side for ``M`` orbits of ``k`` components each (``k`` is
        4 for the flow alone, 8 with a tangent vector).  Orbits that are
        inactive or beyond the escape radius are frozen."""
        R2 = self.escape_radius**2
        flow, hess, apply = self._flow, self._hess, self._apply

        def f(t, s):
            S = s.reshape(-1, k)
            y, z, py, pz = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
            out = np.empty_like(S)
            fl = flow(y, z, py, pz)
            for i in range(4):
                out[:, i] = fl[i]
            if k == 8:
                d = apply(hess(y, z, py, pz), S[:, 4], S[:, 5], S[:, 6], S[:, 7])
                for i in range(4):
                    out[:, 4 + i] = d[i]
            frozen = ~active | (y * y + z * z + py * py + pz * pz > R2)
            out[frozen] = 0.0
            return out.ravel()

        return f


class _BatchDOP853(DOP853):
    """DOP853 with the error norm evaluated per block and maximized."""

    def __init__(self, *args, block: int, **kw):
        self.block = block
        super().__init__(*args, **kw)

    def _estimate_error_norm(self, K, h, scale):
        err5 = (np.dot(K.T, self.E5) / scale).reshape(-1, self.block)
        err3 = (np.dot(K.T, self.E3) / scale).reshape(-1, self.block)
        e5 = np.sum(err5**2, axis=1)
        e3 = np.sum(err3**2, axis=1)
        denom = e5 + 0.01 * e3
        ok = denom > 0
        if not np.any(ok):
            return 0.0
        return float(np.max(np.abs(h) * e5[ok] / np.sqrt(denom[ok] * self.block)))


def _check_tol(tol):
    if not 1e-14 <= tol <= 1e-8:
        raise ValueError(f"tolerance {tol} outside [1e-14, 1e-8]")


def _as_field(obj) -> CMField:
    return obj if isinstance(obj, CMField) else CMField(obj)


# ---------------------------------------------------------------------------
# energy shell


def solve_pz(cm, h: float, y: float, py: float, z: float = 0.0, pz_max: float = ESCAPE_RADIUS) -> float:
    """Smallest positive ``pz`` with ``H(y, z, py, pz) = h``.

    The root is bracketed on a grid in ``(0, pz_max]`` and refined by Brent's
    method followed by Newton polishing.
    """
    fld = _as_field(cm)

    def g(p):
        return fld._energy(y, z, py, p) - h

    grid = np.linspace(0.0, pz_max, 4001)
    vals = g(grid)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    idx = idx[grid[idx + 1] > 0]
    if idx.size == 0:
        raise OutsideShellError(f"energy {h} not reachable from y={y}, py={py}, z={z}")
    i = idx[0]
    lo, hi = grid[i], grid[i + 1]
    if vals[i] == 0.0 and lo > 0:
        return float(lo)
    p = brentq(g, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    for _ in range(3):
        d = fld._flow(y, z, py, p)[1]  # dH/dpz
        if d == 0:
            break
        step = g(p) / d
        p -= step
        if abs(step) < 1e-17:
            break
    if not p > 0:
        raise OutsideShellError(f"no positive pz root for h={h}")
    return float(p)


# ---------------------------------------------------------------------------
# single-orbit integration


def integrate_cm(cm, state, T: float, tol: float = 1e-12, tangent=None, monodromy: bool = False,
                 t_eval=None, events=None) -> Trajectory:
    """Integrate Hamilton's equations (and optionally the variational ones).

    Parameters
    ----------
    cm : CMField, CMHamiltonian or Series
    state : array-like or CMState
        Initial ``(y, z, py, pz)``.
    T : float
        Final time (negative values integrate backwards).
    tol : float
        Relative and absolute tolerance of DOP853.
    tangent : array-like, optional
        Initial tangent vector; its flow is returned in ``Trajectory.tangent``.
    monodromy : bool
        Integrate the fundamental matrix instead of a single tangent vector.
    """
    _check_tol(tol)
    fld = _as_field(cm)
    x0 = state.as_array() if isinstance(state, CMState) else np.asarray(state, dtype=float)[:4]
    if not np.all(np.isfinite(x0)):
        raise ValueError("initial state must be finite")
    if monodromy:
        y0, fun, k = np.concatenate([x0, np.eye(4).ravel()]), fld.rhs_matrix, 20
    elif tangent is not None:
        y0, fun, k = np.concatenate([x0, np.asarray(tangent, float)]), fld.rhs_tangent, 8
    else:
        y0, fun, k = x0, fld.rhs, 4
    R2 = fld.escape_radius**2

    def escape(t, s):
        return s[0] ** 2 + s[1] ** 2 + s[2] ** 2 + s[3] ** 2 - R2

    escape.terminal = True
    evs = [escape] + (list(events) if events else [])
    sol = solve_ivp(fun, (0.0, T), y0, method="DOP853", rtol=tol, atol=tol,
                    dense_output=True, t_eval=t_eval, events=evs)
    if sol.status == -1:
        raise StiffnessError(sol.message)
    S = sol.y.T
    tang = None
    if k == 8:
        tang = S[:, 4:8]
    elif k == 20:
        tang = S[:, 4:].reshape(-1, 4, 4)
    return Trajectory(
        t=sol.t, states=S[:, :4], sol=sol.sol, tangent=tang,
        escaped=sol.status == 1 and len(sol.t_events[0]) > 0,
        events=list(sol.t_events[1:]), event_states=list(sol.y_events[1:]),
    )


# ---------------------------------------------------------------------------
# batched stepping


def _step_batch(fld: CMField, Y0: np.ndarray, T: float, tol: float, on_step, k: int):
    """Integrate ``M`` orbits (rows of ``Y0``) together up to time ``T``.

    ``on_step(solver, S_old, S_new, active)`` is called after each accepted
    step and may clear entries of ``active`` to freeze finished orbits.
    """
    M = Y0.shape[0]
    active = np.ones(M, dtype=bool)
    fun = fld.batch_rhs(k, active)
    solver = _BatchDOP853(fun, 0.0, Y0.ravel().astype(float), T, rtol=tol, atol=tol, block=k)
    S_old = Y0.copy()
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            raise StiffnessError(msg)
        S_new = solver.y.reshape(M, k)
        on_step(solver, S_old, S_new, active)
        S_old = S_new.copy()
        if not active.any():
            break
    return solver.y.reshape(M, k), active


# ---------------------------------------------------------------------------
# Poincare section z = 0, pz > 0


def poincare_map(cm, h: float, seeds, T: float = 200.0, max_crossings: int = 100, tol: float = 1e-12):
    """Successive crossings of ``z = 0`` with ``pz > 0`` for each seed ``(y, py)``.

    Seeds that are not on the energy shell are dropped; orbits that leave
    the escape radius are flagged and keep the crossings found before.
    """
    _check_tol(tol)
    fld = _as_field(cm)
    orbits, rows = [], []
    for y, py in seeds:
        try:
            pz = solve_pz(fld, h, y, py)
        except OutsideShellError:
            continue
        orbits.append(SectionOrbit(seed=(float(y), float(py))))
        rows.append((y, 0.0, py, pz))
    if not rows:
        return []
    Y0 = np.array(rows, dtype=float)
    R2 = fld.escape_radius**2

    def on_step(solver, S_old, S_new, active):
        z0, z1 = S_old[:, 1], S_new[:, 1]
        hit = np.nonzero(active & (z0 < 0.0) & (z1 >= 0.0))[0]
        if hit.size:
            dense = solver.dense_output()
            for i in hit:
                j = 4 * i + 1
                tc = brentq(lambda t: dense(t)[j], solver.t_old, solver.t, xtol=1e-15, rtol=4 * np.finfo(float).eps)
                s = dense(tc)[4 * i: 4 * i + 4]
                if s[3] > 0 and abs(s[1]) <= 1e-12:
                    orbits[i].points.append(SectionPoint(float(s[0]), float(s[2]), float(tc)))
                if len(orbits[i].points) >= max_crossings:
                    active[i] = False
        gone = np.sum(S_new[:, :4] ** 2, axis=1) > R2
        for i in np.nonzero(gone & active)[0]:
            orbits[i].escaped = True
            active[i] = False

    _step_batch(fld, Y0, T, tol, on_step, 4)
    return orbits


def rotation_numbers(orbits, center=(0.0, 0.0)) -> np.ndarray:
    """Mean angle advance per crossing around ``center`` (radians / 2 pi)."""
    out = []
    for o in orbits:
        P = o.as_array()
        if len(P) < 3:
            out.append(np.nan)
            continue
        ang = np.unwrap(np.arctan2(P[:, 1] - center[1], P[:, 0] - center[0]))
        out.append(abs(ang[-1] - ang[0]) / (len(P) - 1) / (2 * np.pi))
    return np.array(out)


# ---------------------------------------------------------------------------
# frequency analysis


def _angle_average(a: int, b: int, n: int = 64) -> float:
    th = 2 * np.pi * np.arange(n) / n
    return float(np.mean(np.sin(th) ** a * np.cos(th) ** b))


def averaged_coefficients(cm) -> tuple[float, float, float, float, float]:
    """Angle average of the quartic part in harmonic actions.

    With ``y = sqrt(2 Jy) sin(ty)``, ``py = sqrt(2 Jy) cos(ty)`` (same for
    ``z``) the average is ``A Jy^2 + B Jz^2 + C Jy Jz``.  Returns
    ``(omega_y, omega_z, A, B, C)``.
    """
    fld = _as_field(cm)
    A = B = C = 0.0
    for e, c in fld.H.homogeneous(4):
        a, b, cc, d = e  # powers of y, z, py, pz
        m = float(c.real) * _angle_average(a, cc) * _angle_average(b, d)
        m *= 2.0 ** ((a + cc) / 2 + (b + d) / 2)
        ky, kz = (a + cc) // 2, (b + d) // 2
        if (a + cc) % 2 or (b + d) % 2:
            continue
        if ky == 2:
            A += m
        elif kz == 2:
            B += m
        else:
            C += m
    return fld.omega_y, fld.omega_z, A, B, C


def frequency_map(cm, h: float, ys, py0: float = 0.0):
    """First-order averaged frequencies along a scan of ``y`` with ``z = 0``.

    Returns an array with columns ``(Jy0, omega_y, omega_z, omega_r)``.
    Scan points off the energy shell are skipped.
    """
    fld = _as_field(cm)
    wy, wz, A, B, C = averaged_coefficients(fld)
    rows = []
    for y in ys:
        try:
            pz = solve_pz(fld, h, y, py0)
        except OutsideShellError:
            continue
        Jy = 0.5 * (y * y + py0 * py0)
        Jz = 0.5 * pz * pz
        oy = wy + 2 * A * Jy + C * Jz
        oz = wz + 2 * B * Jz + C * Jy
        rows.append((Jy, oy, oz, abs(oy / oz)))
    return np.array(rows).reshape(-1, 4)


def spectral_frequency(t, x) -> float:
    """Frequency of the dominant line of ``x(t)`` on a uniform grid.

    A Hann-windowed FFT locates the peak, which is then refined by
    maximizing the windowed Fourier amplitude.
    """
    t = np.asarray(t, float)
    x = np.asarray(x, float) - np.mean(x)
    n = t.size
    dt = t[1] - t[0]
    w = np.hanning(n)
    spec = np.abs(np.fft.rfft(x * w))
    spec[0] = 0.0
    k = int(np.argmax(spec))
    freqs = 2 * np.pi * np.fft.rfftfreq(n, dt)
    dw = freqs[1] - freqs[0]

    def amp(om):
        return -abs(np.sum(x * w * np.exp(-1j * om * (t - t[0]))))

    res = minimize_scalar(amp, bounds=(max(freqs[k] - dw, 0.0), freqs[k] + dw), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, freqs[k])})
    return float(res.x)


def numerical_frequencies(cm, state, T: float = 400.0, n: int = 8192, tol: float = 1e-12):
    """``(omega_y, omega_z)`` extracted from the spectra of ``y(t)`` and ``z(t)``."""
    t = np.linspace(0.0, T, n)
    tr = integrate_cm(cm, state, T, tol=tol, t_eval=t)
    if tr.escaped:
        raise OutsideShellError("orbit escaped during frequency analysis")
    return spectral_frequency(tr.t, tr.states[:, 0]), spectral_frequency(tr.t, tr.states[:, 1])


# ---------------------------------------------------------------------------
# fast Lyapunov indicator


def fli(cm, state, T: float = 100.0, tangent=(1.0, 0.0, 0.0, 0.0), tol: float = 1e-12) -> FLIRecord:
    """``sup_{0 < t <= T} log ||eta(t)||`` for one initial condition."""
    rec = fli_grid(cm, None, [state], T=T, tangent=tangent, tol=tol)
    return rec[0]


def fli_grid(cm, h, points, T: float = 100.0, tangent=(1.0, 0.0, 0.0, 0.0), tol: float = 1e-12):
    """FLI for a set of initial conditions integrated as one batch.

    If ``h`` is given, ``points`` are ``(y, py)`` pairs completed with
    ``z = 0`` and ``pz`` from the energy shell (points off the shell give
    ``nan``); otherwise they are full states.  Escaped orbits get the value
    :data:`FLI_ESCAPED`.
    """
    _check_tol(tol)
    fld = _as_field(cm)
    v = np.asarray(tangent, dtype=float)
    if v.shape != (4,) or not np.any(v):
        raise ValueError("tangent must be a non-zero 4-vector")
    states, valid = [], []
    for p in points:
        if h is None:
            x = p.as_array() if isinstance(p, CMState) else np.asarray(p, float)[:4]
            states.append(x)
            valid.append(True)
            continue
        try:
            pz = solve_pz(fld, h, p[0], p[1])
            states.append(np.array([p[0], 0.0, p[1], pz]))
            valid.append(True)
        except OutsideShellError:
            states.append(np.array([p[0], 0.0, p[1], np.nan]))
            valid.append(False)
    valid = np.array(valid, dtype=bool)
    X = np.array(states).reshape(-1, 4)
    out = np.full(len(X), np.nan)
    escaped = np.zeros(len(X), dtype=bool)
    if valid.any():
        Y0 = np.hstack([X[valid], np.tile(v, (int(valid.sum()), 1))])
        best = np.full(len(Y0), math.log(np.linalg.norm(v)))
        R2 = fld.escape_radius**2
        esc = np.zeros(len(Y0), dtype=bool)

        def on_step(solver, S_old, S_new, active):
            nrm = np.linalg.norm(S_new[:, 4:], axis=1)
            np.maximum(best, np.log(nrm), out=best, where=active)
            gone = active & (np.sum(S_new[:, :4] ** 2, axis=1) > R2)
            esc[gone] = True
            active[gone] = False

        _step_batch(fld, Y0, T, tol, on_step, 8)
        best[esc] = FLI_ESCAPED
        out[valid] = best
        escaped[valid] = esc
    return [
        FLIRecord(state=CMState.from_array(X[i]), tangent=tuple(map(float, v)), T=float(T),
                  value=float(out[i]), escaped=bool(escaped[i]))
        for i in range(len(X))
    ]
