"""Recompute the published reference quantities and compare them cell by cell.

Every comparison yields a :class:`Cell` carrying the computed value, the
reference value, the tolerance used and a pass/fail flag.  The reference
numbers live in ``data/reference_values.yaml``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import yaml

from .bifurcation import bifurcation_scan
from .center_manifold import center_manifold
from .dynamics import CMField
from .equilibria import locate_collinear
from .expansion import expand_hamiltonian
from .linear import linearize
from .normal_form import resonant_coeffs, thresholds
from .params import ModelParams, load_case

__all__ = [
    "Cell",
    "load_reference",
    "pipeline",
    "numeric_threshold",
    "check_locations",
    "check_linear",
    "check_cm_coefficients",
    "check_normal_form",
    "check_thresholds",
    "reproduce_all",
    "format_report",
]


@dataclass(frozen=True)
class Cell:
    group: str
    case: str
    name: str
    value: float
    reference: float
    tol: float
    kind: str  # "abs" or "rel"

    @property
    def error(self) -> float:
        d = abs(self.value - self.reference)
        return d if self.kind == "abs" else d / abs(self.reference)

    @property
    def passed(self) -> bool:
        return self.error <= self.tol


@lru_cache(maxsize=1)
def load_reference() -> dict:
    text = resources.files("halobif.data").joinpath("reference_values.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text)


def _params(system: str, beta, A, mu_from_masses: bool = False) -> ModelParams:
    return load_case(system, beta=beta, A=A, mu_from_masses=mu_from_masses)


def _label(p: ModelParams) -> str:
    return f"{p.name} beta={p.beta:g} A={p.A:g}"


@lru_cache(maxsize=64)
def pipeline(params: ModelParams, point: int, N: int = 4):
    """``(point, linear data, center-manifold Hamiltonian)`` for ``params``."""
    pt = locate_collinear(params, point)
    lin = linearize(params, pt)
    cm = center_manifold(expand_hamiltonian(params, pt, N), lin=lin)
    return pt, lin, cm


def numeric_threshold(params: ModelParams, point: int, N: int = 4, h_range=(0.01, 0.6), step: float = 0.01,
                      tol: float = 1e-12):
    """First energy at which the planar Lyapunov orbit turns unstable."""
    _, _, cm = pipeline(params, point, N)
    scan = bifurcation_scan(CMField(cm), h_range, step, family="planar", tol=tol)
    c = scan.first(1)
    return None if c is None else c.h


def check_locations(systems=None) -> list[Cell]:
    ref = load_reference()["locations"]
    tol = ref["tolerance"]["abs"]
    cells = []
    for name, row in ref["cases"].items():
        if systems and name not in systems:
            continue
        p = _params(name, row["beta"], None)
        for j in (1, 2, 3):
            X = locate_collinear(p, j).X
            cells.append(Cell("locations", _label(p), f"L{j}", X, row[f"L{j}"], tol, "abs"))
    return cells


def check_linear(systems=None) -> list[Cell]:
    ref = load_reference()["linear"]
    tol = ref["tolerance"]["rel"]
    cells = []
    for name, row in ref["cases"].items():
        if systems and name not in systems:
            continue
        p = _params(name, row["beta"], None)
        pt, lin, _ = pipeline(p, ref["point"])
        got = {"gamma": pt.gamma, "a": lin.a, "b": lin.b, "c": lin.c, "lambda1": lin.lambda1,
               "omega1": lin.omega1, "omega2": lin.omega2, "s1": lin.s1, "s2": lin.s2}
        for k, v in got.items():
            cells.append(Cell("linear", _label(p), k, v, row[k], tol, "rel"))
    return cells


def check_cm_coefficients(mu_from_masses: bool = True) -> list[Cell]:
    """Degree-4 center-manifold coefficients.

    By default the mass ratio is recomputed from the primaries' masses; the
    tabulated, rounded value shifts the cubic coefficients by about 2e-5
    relative.
    """
    ref = load_reference()["cm_coefficients"]
    tol = ref["tolerance"]
    p = _params(ref["system"], ref["beta"], None, mu_from_masses=mu_from_masses)
    _, _, cm = pipeline(p, ref["point"], ref["degree"])
    label = _label(p) + (" mu=masses" if mu_from_masses else " mu=tabulated")
    cells = []
    for k, h in ref["terms"]:
        v = float(cm.H[tuple(k)].real)
        if abs(h) > tol["small_below"]:
            cells.append(Cell("cm_coefficients", label, "h" + "".join(map(str, k)), v, h, tol["rel"], "rel"))
        else:
            cells.append(Cell("cm_coefficients", label, "h" + "".join(map(str, k)), v, h, tol["abs_small"], "abs"))
    return cells


def check_normal_form(systems=None) -> list[Cell]:
    ref = load_reference()["normal_form"]
    tol = ref["tolerance"]["rel"]
    cells = []
    for row in ref["rows"]:
        if systems and row["system"] not in systems:
            continue
        p = _params(row["system"], row["beta"], row["A"])
        _, _, cm = pipeline(p, ref["point"])
        rc = resonant_coeffs(cm)
        for k in ("a20", "a02", "a11", "b11"):
            cells.append(Cell("normal_form", _label(p), k, getattr(rc, k), row[k], tol, "rel"))
    return cells


def check_thresholds(systems=None, numeric: bool = True, step: float = 0.01) -> list[Cell]:
    ref = load_reference()["thresholds"]
    tol = ref["tolerance"]
    cells = []
    for row in ref["rows"]:
        if systems and row["system"] not in systems:
            continue
        p = _params(row["system"], row["beta"], row["A"])
        for j in (1, 2):
            _, _, cm = pipeline(p, j)
            th = thresholds(resonant_coeffs(cm))
            cells.append(Cell("thresholds", _label(p), f"L{j}_anal", th.h_ly, row[f"L{j}_anal"], tol["anal_abs"], "abs"))
            if numeric:
                h = numeric_threshold(p, j, step=step)
                cells.append(Cell("thresholds", _label(p), f"L{j}_num", float("nan") if h is None else h,
                                  row[f"L{j}_num"], tol["num_abs"], "abs"))
    return cells


def reproduce_all(systems=None, numeric: bool = True, mu_from_masses: bool = True) -> list[Cell]:
    cells = check_locations(systems) + check_linear(systems)
    ref_sys = load_reference()["cm_coefficients"]["system"]
    if not systems or ref_sys in systems:
        cells += check_cm_coefficients(mu_from_masses)
    cells += check_normal_form(systems) + check_thresholds(systems, numeric)
    return cells


def format_report(cells) -> str:
    lines = ["group\tcase\tquantity\tcomputed\treference\terror\ttolerance\tstatus"]
    for c in cells:
        lines.append(
            f"{c.group}\t{c.case}\t{c.name}\t{c.value:.12g}\t{c.reference:.12g}\t"
            f"{c.error:.3e}\t{c.kind}:{c.tol:g}\t{'PASS' if c.passed else 'FAIL'}"
        )
    n_fail = sum(not c.passed for c in cells)
    lines.append(f"# {len(cells) - n_fail}/{len(cells)} cells within tolerance")
    return "\n".join(lines) + "\n"
