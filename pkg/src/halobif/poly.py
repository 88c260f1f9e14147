"""Sparse truncated polynomials in canonical variables.

A :class:`Series` stores a polynomial in ``nvars`` variables as an integer
exponent array and a coefficient array (real or complex).  Variables are
ordered positions first, then momenta: ``(q1, ..., qd, p1, ..., pd)``.
Every operation truncates at the series' maximum total degree and the
terms are kept in graded lexicographic order, so iteration and
serialization are deterministic.
"""

from __future__ import annotations

import io
from typing import Iterable, Mapping

import numpy as np

__all__ = ["Series", "ZERO_TOL", "MAX_DEGREE", "poly_arith", "poisson_bracket", "substitute_linear"]

ZERO_TOL = 1e-16
MAX_DEGREE = 12


class Series:
    """Graded sparse polynomial truncated at total degree ``degree``.

    Parameters
    ----------
    nvars : int
        Number of variables.
    degree : int
        Maximum total degree kept.
    exps : array_like of int, shape (m, nvars)
    coefs : array_like, shape (m,)
        Duplicated exponents are summed; terms above ``degree`` are dropped.
    """

    __slots__ = ("nvars", "degree", "exps", "coefs")

    def __init__(self, nvars: int, degree: int, exps=None, coefs=None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        if not 0 <= degree <= MAX_DEGREE:
            raise ValueError(f"degree must lie in [0, {MAX_DEGREE}]")
        self.nvars = int(nvars)
        self.degree = int(degree)
        if exps is None:
            self.exps = np.zeros((0, nvars), dtype=np.int64)
            self.coefs = np.zeros(0, dtype=float)
            return
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, nvars)
        coefs = np.asarray(coefs)
        if coefs.dtype.kind not in "fc":
            coefs = coefs.astype(float)
        coefs = coefs.reshape(-1)
        if exps.shape[0] != coefs.shape[0]:
            raise ValueError("exps and coefs lengths differ")
        if np.any(exps < 0):
            raise ValueError("negative exponent")
        self.exps, self.coefs = _canonical(exps, coefs, self.degree)

    # -- construction -----------------------------------------------------

    @classmethod
    def _raw(cls, nvars, degree, exps, coefs):
        s = cls.__new__(cls)
        s.nvars, s.degree, s.exps, s.coefs = nvars, degree, exps, coefs
        return s

    @classmethod
    def zero(cls, nvars, degree):
        return cls(nvars, degree)

    @classmethod
    def constant(cls, nvars, degree, value):
        return cls(nvars, degree, np.zeros((1, nvars), dtype=np.int64), [value])

    @classmethod
    def variable(cls, nvars, degree, i, coef=1.0):
        e = np.zeros((1, nvars), dtype=np.int64)
        e[0, i] = 1
        return cls(nvars, degree, e, [coef])

    @classmethod
    def monomial(cls, nvars, degree, exponent, coef=1.0):
        return cls(nvars, degree, np.asarray(exponent).reshape(1, nvars), [coef])

    @classmethod
    def from_dict(cls, nvars, degree, terms: Mapping[tuple, complex]):
        if not terms:
            return cls(nvars, degree)
        keys = list(terms)
        return cls(nvars, degree, np.array(keys), np.array([terms[k] for k in keys]))

    def to_dict(self) -> dict[tuple, complex]:
        return {tuple(int(k) for k in e): c.item() for e, c in zip(self.exps, self.coefs)}

    # -- inspection -------------------------------------------------------

    def __len__(self):
        return self.coefs.shape[0]

    def __iter__(self):
        for e, c in zip(self.exps, self.coefs):
            yield tuple(int(k) for k in e), c.item()

    def __repr__(self):
        return f"Series(nvars={self.nvars}, degree={self.degree}, terms={len(self)}, dtype={self.coefs.dtype})"

    def __getitem__(self, exponent) -> complex:
        exponent = np.asarray(exponent, dtype=np.int64)
        hit = np.nonzero(np.all(self.exps == exponent, axis=1))[0]
        return self.coefs[hit[0]].item() if hit.size else 0.0

    @property
    def is_complex(self) -> bool:
        return self.coefs.dtype.kind == "c"

    def degrees(self) -> np.ndarray:
        return self.exps.sum(axis=1)

    def homogeneous(self, k: int) -> "Series":
        """Degree-``k`` component."""
        m = self.degrees() == k
        return Series._raw(self.nvars, self.degree, self.exps[m], self.coefs[m])

    def truncate(self, k: int) -> "Series":
        """Drop terms above degree ``k`` (the nominal degree is kept)."""
        m = self.degrees() <= k
        return Series._raw(self.nvars, self.degree, self.exps[m], self.coefs[m])

    def with_degree(self, degree: int) -> "Series":
        return Series(self.nvars, degree, self.exps, self.coefs)

    def select(self, mask) -> "Series":
        mask = np.asarray(mask, dtype=bool)
        return Series._raw(self.nvars, self.degree, self.exps[mask], self.coefs[mask])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coefs))) if len(self) else 0.0

    def real(self) -> "Series":
        return Series(self.nvars, self.degree, self.exps, self.coefs.real.copy())

    def imag(self) -> "Series":
        return Series(self.nvars, self.degree, self.exps, self.coefs.imag.copy())

    def conj(self) -> "Series":
        return Series._raw(self.nvars, self.degree, self.exps, np.conj(self.coefs))

    def max_imag(self) -> float:
        return float(np.max(np.abs(self.coefs.imag))) if self.is_complex and len(self) else 0.0

    def realify(self, tol: float = 1e-12) -> "Series":
        """Drop imaginary parts after checking they are at most ``tol``."""
        err = self.max_imag()
        if err > tol:
            raise ArithmeticError(f"imaginary residue {err:.3e} exceeds {tol:.1e}")
        return self.real()

    # -- arithmetic -------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.nvars != self.nvars:
            raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if np.isscalar(other):
            other = Series.constant(self.nvars, self.degree, other)
        self._check(other)
        deg = min(self.degree, other.degree)
        return Series(
            self.nvars, deg,
            np.concatenate([self.exps, other.exps]),
            np.concatenate([self.coefs, other.coefs]),
        )

    __radd__ = __add__

    def __neg__(self):
        return Series._raw(self.nvars, self.degree, self.exps, -self.coefs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "Series":
        if factor == 0:
            return Series(self.nvars, self.degree)
        return Series(self.nvars, self.degree, self.exps, self.coefs * factor)

    def __mul__(self, other):
        if isinstance(other, Series):
            self._check(other)
            return _multiply(self, other, min(self.degree, other.degree))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(1.0 / other)

    def __pow__(self, k: int):
        out = Series.constant(self.nvars, self.degree, 1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def derivative(self, i: int) -> "Series":
        e = self.exps[:, i]
        m = e > 0
        exps = self.exps[m].copy()
        exps[:, i] -= 1
        return Series._raw(self.nvars, self.degree, exps, self.coefs[m] * e[m])

    def allclose(self, other: "Series", atol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= atol

    def __call__(self, *x):
        """Evaluate at a point; each argument may be an array (broadcast)."""
        if len(x) == 1 and np.ndim(x[0]) >= 1 and np.shape(x[0])[0] == self.nvars:
            x = tuple(np.asarray(x[0]))
        if len(x) != self.nvars:
            raise ValueError(f"expected {self.nvars} values")
        x = [np.asarray(v) for v in x]
        total = 0.0
        for e, c in zip(self.exps, self.coefs):
            term = c
            for v, k in zip(x, e):
                if k:
                    term = term * v**k
            total = total + term
        return total

    # -- canonical operations ----------------------------------------------

    def poisson_bracket(self, other: "Series") -> "Series":
        return poisson_bracket(self, other)

    def substitute_linear(self, M) -> "Series":
        return substitute_linear(self, M)

    # -- text format --------------------------------------------------------

    def dumps(self, header: str | None = None) -> str:
        """One term per line: exponents, then real part (and imaginary part
        for complex series)."""
        buf = io.StringIO()
        kind = "complex" if self.is_complex else "real"
        if header:
            for line in header.splitlines():
                buf.write(f"# {line}\n")
        buf.write(f"# nvars={self.nvars} degree={self.degree} dtype={kind}\n")
        for e, c in zip(self.exps, self.coefs):
            ks = " ".join(str(int(k)) for k in e)
            if self.is_complex:
                buf.write(f"{ks} {c.real:.17g} {c.imag:.17g}\n")
            else:
                buf.write(f"{ks} {c:.17g}\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> "Series":
        nvars = degree = None
        kind = "real"
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        if k == "nvars":
                            nvars = int(v)
                        elif k == "degree":
                            degree = int(v)
                        elif k == "dtype":
                            kind = v
                continue
            rows.append(line.split())
        if nvars is None:
            if not rows:
                raise ValueError("empty series text without header")
            nvars = len(rows[0]) - (2 if kind == "complex" else 1)
        exps = np.array([[int(t) for t in r[:nvars]] for r in rows], dtype=np.int64).reshape(-1, nvars)
        if kind == "complex":
            coefs = np.array([float(r[nvars]) + 1j * float(r[nvars + 1]) for r in rows], dtype=complex)
        else:
            coefs = np.array([float(r[nvars]) for r in rows], dtype=float)
        if degree is None:
            degree = int(exps.sum(axis=1).max()) if len(rows) else 0
        return cls(nvars, degree, exps, coefs)


# -- kernels ---------------------------------------------------------------


def _keys(exps, base):
    nv = exps.shape[1]
    weights = base ** np.arange(nv - 1, -1, -1, dtype=np.int64)
    return exps @ weights


def _canonical(exps, coefs, degree):
    if exps.shape[0] == 0:
        return exps.reshape(0, exps.shape[1]), coefs[:0]
    deg = exps.sum(axis=1)
    m = deg <= degree
    exps, coefs, deg = exps[m], coefs[m], deg[m]
    if exps.shape[0] == 0:
        return exps, coefs
    base = degree + 1
    keys = _keys(exps, base)
    uniq, inv = np.unique(keys, return_inverse=True)
    if uniq.size != keys.size:
        if coefs.dtype.kind == "c":
            summed = np.bincount(inv, weights=coefs.real, minlength=uniq.size) + 1j * np.bincount(
                inv, weights=coefs.imag, minlength=uniq.size
            )
        else:
            summed = np.bincount(inv, weights=coefs, minlength=uniq.size)
        first = np.zeros(uniq.size, dtype=np.int64)
        first[inv[::-1]] = np.arange(inv.size)[::-1]
        exps, coefs, deg, keys = exps[first], summed, deg[first], uniq
    keep = np.abs(coefs) > ZERO_TOL
    exps, coefs, deg, keys = exps[keep], coefs[keep], deg[keep], keys[keep]
    order = np.lexsort((-keys, deg))
    return exps[order], coefs[order]


def _multiply(a: Series, b: Series, degree: int) -> Series:
    if len(a) == 0 or len(b) == 0:
        return Series(a.nvars, degree)
    da, db = a.degrees(), b.degrees()
    pe, pc = [], []
    for ka in np.unique(da):
        ia = da == ka
        ea, ca = a.exps[ia], a.coefs[ia]
        for kb in np.unique(db):
            if ka + kb > degree:
                continue
            ib = db == kb
            eb, cb = b.exps[ib], b.coefs[ib]
            pe.append((ea[:, None, :] + eb[None, :, :]).reshape(-1, a.nvars))
            pc.append(np.multiply.outer(ca, cb).reshape(-1))
    if not pe:
        return Series(a.nvars, degree)
    return Series(a.nvars, degree, np.concatenate(pe), np.concatenate(pc))


def poly_arith(f: Series, g, op: str) -> Series:
    """Dispatch ``add``, ``mul`` or ``scale`` (``g`` a scalar for ``scale``)."""
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "scale":
        return f.scale(g)
    raise ValueError(f"unknown op {op!r}")


def poisson_bracket(f: Series, g: Series) -> Series:
    """``{f, g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i``, truncated."""
    f._check(g)
    if f.nvars % 2:
        raise ValueError("Poisson bracket needs an even number of variables")
    d = f.nvars // 2
    degree = min(f.degree, g.degree)
    pieces = []
    for i in range(d):
        fq, gp = f.derivative(i), g.derivative(i + d)
        fp, gq = f.derivative(i + d), g.derivative(i)
        pieces.append(_multiply(fq, gp, degree))
        pieces.append(-_multiply(fp, gq, degree))
    exps = np.concatenate([p.exps for p in pieces])
    coefs = np.concatenate([p.coefs for p in pieces]) if exps.size else np.zeros(0)
    return Series(f.nvars, degree, exps, coefs)


def substitute_linear(f: Series, M) -> Series:
    """Compose ``f`` with the linear map ``x_old = M @ x_new``."""
    M = np.asarray(M)
    nv = f.nvars
    if M.shape != (nv, nv):
        raise ValueError(f"matrix shape {M.shape} does not match nvars={nv}")
    dtype = np.result_type(f.coefs.dtype, M.dtype, float)
    eye = np.eye(nv, dtype=np.int64)
    forms = []
    for i in range(nv):
        nz = np.nonzero(M[i])[0]
        forms.append((eye[nz], M[i, nz].astype(dtype)))

    cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {(0,) * nv: (np.zeros((1, nv), dtype=np.int64), np.ones(1, dtype=dtype))}
    base = f.degree + 1

    def power(e):
        key = tuple(e)
        hit = cache.get(key)
        if hit is not None:
            return hit
        i = int(np.nonzero(e)[0][0])
        parent = list(e)
        parent[i] -= 1
        pe, pc = power(parent)
        le, lc = forms[i]
        if le.shape[0] == 0:
            out = (np.zeros((0, nv), dtype=np.int64), np.zeros(0, dtype=dtype))
        else:
            ne = (pe[:, None, :] + le[None, :, :]).reshape(-1, nv)
            nc = np.multiply.outer(pc, lc).reshape(-1)
            keys = _keys(ne, base)
            uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
            if dtype.kind == "c":
                s = np.bincount(inv, weights=nc.real, minlength=uniq.size) + 1j * np.bincount(inv, weights=nc.imag, minlength=uniq.size)
            else:
                s = np.bincount(inv, weights=nc, minlength=uniq.size)
            out = (ne[first], s.astype(dtype))
        cache[key] = out
        return out

    all_e, all_c = [], []
    for e, c in zip(f.exps, f.coefs):
        pe, pc = power(e)
        all_e.append(pe)
        all_c.append(pc * c)
    if not all_e:
        return Series(nv, f.degree)
    return Series(nv, f.degree, np.concatenate(all_e), np.concatenate(all_c))


def variables(nvars: int, degree: int) -> list[Series]:
    """The coordinate functions as series."""
    return [Series.variable(nvars, degree, i) for i in range(nvars)]


def sum_series(items: Iterable[Series], nvars: int, degree: int) -> Series:
    items = list(items)
    if not items:
        return Series(nvars, degree)
    return Series(
        nvars, degree,
        np.concatenate([s.exps for s in items]),
        np.concatenate([s.coefs for s in items]),
    )
