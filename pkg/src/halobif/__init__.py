"""Halo bifurcations near the collinear points of the restricted three-body
problem with a radiating primary and an oblate secondary.

Pipeline: parameters -> collinear equilibria -> linear normalization ->
Taylor expansion -> center-manifold reduction -> resonant normal form and
bifurcation thresholds, cross-checked by numerical diagnostics on the
reduced flow.
"""

__version__ = "0.1.0"

from .params import ModelParams, ParameterError, build_params, load_case, known_cases, sail_performance
from .equilibria import CollinearPoint, locate_collinear
from .linear import LinearData, linearize
from .poly import Series
from .expansion import ExpandedHamiltonian, expand_hamiltonian, diagonalize_and_complexify
from .center_manifold import CMHamiltonian, center_manifold
from .normal_form import ResonantCoeffs, Thresholds, resonant_coeffs, thresholds, family_classification
from .dynamics import CMField, CMState, solve_pz, integrate_cm, poincare_map, frequency_map, fli, fli_grid
from .bifurcation import bifurcation_scan, planar_lyapunov, vertical_lyapunov, section_fixed_points

__all__ = [
    "ModelParams", "ParameterError", "build_params", "load_case", "known_cases", "sail_performance",
    "CollinearPoint", "locate_collinear",
    "LinearData", "linearize",
    "Series",
    "ExpandedHamiltonian", "expand_hamiltonian", "diagonalize_and_complexify",
    "CMHamiltonian", "center_manifold",
    "ResonantCoeffs", "Thresholds", "resonant_coeffs", "thresholds", "family_classification",
    "CMField", "CMState", "solve_pz", "integrate_cm", "poincare_map", "frequency_map", "fli", "fli_grid",
    "bifurcation_scan", "planar_lyapunov", "vertical_lyapunov", "section_fixed_points",
]
