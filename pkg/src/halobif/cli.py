"""Command-line front end.

Every subcommand accepts ``--config FILE`` (YAML mapping whose keys are the
long option names with dashes replaced by underscores); explicit flags
override file values.  Exit codes: 0 success, 1 usage or configuration
error, 2 numerical failure, 3 reference comparison failed.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np
import yaml

from . import __version__
from .bifurcation import bifurcation_scan, section_extent
from .center_manifold import center_manifold
from .dynamics import CMField, OutsideShellError, fli_grid, frequency_map, poincare_map
from .equilibria import locate_collinear
from .expansion import expand_hamiltonian
from .linear import linearize
from .normal_form import resonant_coeffs, thresholds
from .params import ParameterError, build_params, load_case
from .reproduce import format_report, reproduce_all

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_DIFF = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field path."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Resolved run configuration."""

    system: str | None = None
    mu: float | None = None
    beta: float | None = None
    A: float | None = None
    mu_from_masses: bool = False
    point: int = 1
    degree: int = 4
    tol: float = 1e-12
    output: str | None = None
    energy: float | None = None
    T: float = 100.0
    crossings: int = 100
    seeds: int = 11
    y_range: list | None = None
    py_range: list | None = None
    grid: list = field(default_factory=lambda: [41, 41])
    num: int = 101
    py0: float = 0.0
    tangent: list = field(default_factory=lambda: [1.0, 0.0, 0.0, 0.0])
    h_range: list = field(default_factory=lambda: [0.01, 0.6])
    step: float = 0.01
    family: str = "planar"
    numeric: bool = True
    tabulated_mu: bool = False
    systems: list | None = None

    def params(self):
        if self.system is not None and self.mu is not None:
            raise ConfigError("system/mu: give either a system name or raw parameters")
        if self.system is not None:
            return load_case(self.system, beta=self.beta, A=self.A, mu_from_masses=self.mu_from_masses)
        if self.mu is None:
            raise ConfigError("system: a system name or --mu is required")
        return build_params(self.mu, self.beta or 0.0, self.A or 0.0)


_TYPES = {
    "point": int, "degree": int, "crossings": int, "seeds": int, "num": int,
    "tol": float, "T": float, "step": float, "py0": float, "energy": float,
    "mu": float, "beta": float, "A": float,
}


def _point(text) -> int:
    s = str(text).upper().lstrip("L")
    if s not in ("1", "2", "3"):
        raise ConfigError(f"point: expected L1, L2 or L3, got {text!r}")
    return int(s)


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: {path} is not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a mapping")
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, value in data.items():
        k = str(key).replace("-", "_")
        if k not in known:
            raise ConfigError(f"config.{key}: unknown field")
        out[k] = _coerce(k, value, f"config.{key}")
    return out


def _coerce(k, value, path):
    if value is None:
        return None
    try:
        if k == "point":
            return _point(value)
        if k in _TYPES:
            return _TYPES[k](value)
        if k in ("y_range", "py_range", "h_range", "grid", "tangent"):
            seq = [float(v) for v in value]
            n = {"grid": 2, "tangent": 4}.get(k, 2)
            if len(seq) != n:
                raise ValueError(f"expected {n} numbers")
            return [int(v) for v in seq] if k == "grid" else seq
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return value


def resolve(args: argparse.Namespace) -> RunConfig:
    values = load_config(args.config) if getattr(args, "config", None) else {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = _coerce(f.name, v, f"--{f.name.replace('_', '-')}")
    cfg = RunConfig(**values)
    if not 1e-14 <= cfg.tol <= 1e-8:
        raise ConfigError(f"tol: {cfg.tol} outside [1e-14, 1e-8]")
    if not 2 <= cfg.degree <= 12:
        raise ConfigError(f"degree: {cfg.degree} outside [2, 12]")
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def _emit(cfg: RunConfig, text: str, default_name: str | None = None):
    if cfg.output:
        path = cfg.output
        if os.path.isdir(path) and default_name:
            path = os.path.join(path, default_name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(path)
    else:
        sys.stdout.write(text)


def _rows(header, rows, fmt="{:.15e}"):
    lines = ["\t".join(header)]
    for r in rows:
        lines.append("\t".join(fmt.format(v) if isinstance(v, float) else str(v) for v in r))
    return "\n".join(lines) + "\n"


def _cm(cfg):
    p = cfg.params()
    pt = locate_collinear(p, cfg.point)
    lin = linearize(p, pt)
    return p, pt, lin, center_manifold(expand_hamiltonian(p, pt, cfg.degree), lin=lin)


def _ranges(cfg, fld, h, shrink=0.98):
    """Scan ranges in ``y`` and ``py``; by default the section's extent at ``h``."""
    if cfg.y_range is not None and cfg.py_range is not None:
        return cfg.y_range, cfg.py_range
    ymin, ymax, pmin, pmax = section_extent(fld, h)
    yr = cfg.y_range if cfg.y_range is not None else [shrink * ymin, shrink * ymax]
    pr = cfg.py_range if cfg.py_range is not None else [shrink * pmin, shrink * pmax]
    return yr, pr


def _need_energy(cfg):
    if cfg.energy is None:
        raise ConfigError("energy: required for this subcommand")
    return cfg.energy


# ---------------------------------------------------------------------------
# subcommands


def cmd_locate(cfg):
    p = cfg.params()
    rows = []
    for j in (1, 2, 3):
        c = locate_collinear(p, j)
        rows.append((f"L{j}", c.gamma, c.alpha, c.X, c.residual))
    _emit(cfg, _rows(("point", "gamma", "alpha", "X", "residual"), rows))


def cmd_linearize(cfg):
    p = cfg.params()
    lin = linearize(p, locate_collinear(p, cfg.point))
    keys = ("a", "b", "c", "Delta", "n", "lambda1", "omega1", "omega2", "s1", "s2")
    rows = [(k, float(getattr(lin, k))) for k in keys]
    rows.append(("symplecticity_error", lin.symplecticity_error()))
    _emit(cfg, _rows(("quantity", "value"), rows))


def cmd_expand(cfg):
    p = cfg.params()
    exp = expand_hamiltonian(p, locate_collinear(p, cfg.point), cfg.degree)
    _emit(cfg, exp.H.dumps(header=f"expansion about L{cfg.point}, variables x y z px py pz"), "expansion.txt")


def cmd_reduce(cfg):
    _, _, _, cm = _cm(cfg)
    rows = [(*e, float(c.real)) for e, c in cm.H]
    _emit(cfg, _rows(("k_y", "k_z", "k_py", "k_pz", "coefficient"), rows), "center_manifold.txt")


def cmd_thresholds(cfg):
    p, _, _, cm = _cm(cfg)
    rc = resonant_coeffs(cm)
    th = thresholds(rc)
    rows = [(k, float(getattr(rc, k))) for k in ("a20", "a02", "a11", "b11", "omega_p", "omega_v", "delta")]
    rows += [(k, float(v)) for k, v in th.as_dict().items()]
    _emit(cfg, _rows(("quantity", "value"), rows))


def cmd_poincare(cfg):
    h = _need_energy(cfg)
    _, _, _, cm = _cm(cfg)
    fld = CMField(cm)
    yr, _ = _ranges(cfg, fld, h)
    ys = np.linspace(yr[0], yr[1], cfg.seeds)
    orbits = poincare_map(fld, h, [(y, 0.0) for y in ys], T=cfg.T, max_crossings=cfg.crossings, tol=cfg.tol)
    rows = []
    for i, o in enumerate(orbits):
        for pnt in o.points:
            rows.append((i, pnt.y, pnt.py, pnt.t, int(o.escaped)))
    _emit(cfg, _rows(("orbit", "y", "py", "t", "escaped"), rows), "section.txt")


def cmd_freqmap(cfg):
    h = _need_energy(cfg)
    _, _, _, cm = _cm(cfg)
    fld = CMField(cm)
    yr, _ = _ranges(cfg, fld, h)
    ys = np.linspace(yr[0], yr[1], cfg.num)
    data = frequency_map(fld, h, ys, py0=cfg.py0)
    _emit(cfg, _rows(("Jy0", "omega_y", "omega_z", "omega_r"), [tuple(map(float, r)) for r in data]), "freqmap.txt")


def cmd_fli(cfg):
    h = _need_energy(cfg)
    _, _, _, cm = _cm(cfg)
    fld = CMField(cm)
    yr, pr = _ranges(cfg, fld, h)
    ny, npy = cfg.grid
    pts = [(y, py) for py in np.linspace(*pr, npy) for y in np.linspace(*yr, ny)]
    recs = fli_grid(fld, h, pts, T=cfg.T, tangent=cfg.tangent, tol=cfg.tol)
    rows = [(float(p[0]), float(p[1]), r.value) for p, r in zip(pts, recs)]
    _emit(cfg, _rows(("y", "py", "FLI"), rows), "fli.txt")


def cmd_bifscan(cfg):
    _, _, _, cm = _cm(cfg)
    res = bifurcation_scan(CMField(cm), cfg.h_range, cfg.step, family=cfg.family, tol=cfg.tol)
    rows = [(c.h, c.level, "destabilizing" if c.destabilizing else "stabilizing") for c in res.crossings]
    text = _rows(("h", "index_level", "kind"), rows)
    if not res.found:
        text += "# no crossing in range\n"
    _emit(cfg, text, "bifscan.txt")


def cmd_reproduce(cfg):
    systems = cfg.systems or ([cfg.system] if cfg.system else None)
    cells = reproduce_all(systems, numeric=cfg.numeric, mu_from_masses=not cfg.tabulated_mu)
    _emit(cfg, format_report(cells), "reproduce.txt")
    return EXIT_OK if all(c.passed for c in cells) else EXIT_DIFF


COMMANDS = {
    "locate": (cmd_locate, "collinear equilibria"),
    "linearize": (cmd_linearize, "linear stability data and symplectic scalings"),
    "expand": (cmd_expand, "Taylor expansion about L1/L2"),
    "reduce": (cmd_reduce, "Hamiltonian restricted to the center manifold"),
    "thresholds": (cmd_thresholds, "resonant normal form and analytic bifurcation thresholds"),
    "poincare": (cmd_poincare, "Poincare section z = 0, pz > 0"),
    "freqmap": (cmd_freqmap, "averaged frequency ratio along a scan in y"),
    "fli": (cmd_fli, "fast Lyapunov indicator grid"),
    "bifscan": (cmd_bifscan, "stability scan of a normal-mode family"),
    "reproduce-tables": (cmd_reproduce, "recompute the reference tables and diff them"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="halobif", description="Halo bifurcation thresholds on the center manifold of L1/L2.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="YAML file with run settings")
        sp.add_argument("--system", help="earth-moon, sun-barycenter or sun-vesta")
        sp.add_argument("--mu", help="mass ratio (instead of --system)")
        sp.add_argument("--beta", help="sail performance")
        sp.add_argument("--A", dest="A", help="oblateness factor")
        sp.add_argument("--mu-from-masses", action="store_const", const=True, default=None,
                        help="derive mu from the tabulated masses of the primaries")
        sp.add_argument("--point", help="L1, L2 (or L3 for locate)")
        sp.add_argument("--degree", help="truncation degree N")
        sp.add_argument("--tol", help="integration tolerance")
        sp.add_argument("--output", "-o", help="output file or directory (default: stdout)")
        if name in ("poincare", "freqmap", "fli"):
            sp.add_argument("--energy", help="energy level h")
            sp.add_argument("--y-range", nargs=2, help="scan or grid range in y")
        if name == "poincare":
            sp.add_argument("--seeds", help="number of seeds on py = 0")
            sp.add_argument("--crossings", help="crossings per orbit")
            sp.add_argument("--T", dest="T", help="integration horizon")
        if name == "freqmap":
            sp.add_argument("--num", help="number of scan points")
            sp.add_argument("--py0", help="fixed py of the scan")
        if name == "fli":
            sp.add_argument("--py-range", nargs=2, help="grid range in py")
            sp.add_argument("--grid", nargs=2, help="grid size (ny npy)")
            sp.add_argument("--T", dest="T", help="FLI horizon")
            sp.add_argument("--tangent", nargs=4, help="initial tangent vector")
        if name == "bifscan":
            sp.add_argument("--h-range", nargs=2, help="energy range")
            sp.add_argument("--step", help="energy step of the scan")
            sp.add_argument("--family", choices=("planar", "vertical"), help="normal-mode family")
        if name == "reproduce-tables":
            sp.add_argument("--no-numeric", dest="numeric", action="store_const", const=False, default=None,
                            help="skip the numerical bifurcation scans")
            sp.add_argument("--tabulated-mu", action="store_const", const=True, default=None,
                            help="use the rounded tabulated mass ratio for the center-manifold check")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func, _ = COMMANDS[args.command]
    try:
        cfg = resolve(args)
        if args.command != "locate" and cfg.point == 3:
            raise ConfigError("point: only L1 and L2 are supported beyond locate")
        code = func(cfg)
    except (ConfigError, ParameterError, LookupError) as exc:
        print(f"halobif {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, OutsideShellError, np.linalg.LinAlgError) as exc:
        print(f"halobif {args.command}: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"halobif {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
