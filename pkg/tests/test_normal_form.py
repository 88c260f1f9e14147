import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halobif.normal_form import (
    DegenerateResonanceError,
    ResonanceError,
    ResonantCoeffs,
    family_classification,
    normal_form_hamiltonian,
    resonant_coeffs,
    resonant_normalize,
    thresholds,
)
from halobif.params import load_case
from halobif.poly import Series, poisson_bracket
from halobif.reproduce import load_reference, pipeline


def test_earth_moon_coefficients(em_cm):
    rc = resonant_coeffs(em_cm)
    assert rc.as_tuple() == pytest.approx((0.162109, 0.144891, 0.0726274, 0.116537), rel=1e-4)


def test_sun_vesta_coefficients(sv_cm):
    rc = resonant_coeffs(sv_cm)
    assert rc.as_tuple() == pytest.approx((0.0157472, 0.00203253, 4.11966e-7, 0.00533371), rel=1e-4)


@pytest.mark.parametrize("row", load_reference()["normal_form"]["rows"], ids=lambda r: f"{r['system']}-{r['beta']}")
def test_reference_rows(row):
    cm = pipeline(load_case(row["system"], beta=row["beta"], A=row["A"]), 1)[2]
    rc = resonant_coeffs(cm)
    for k in ("a20", "a02", "a11", "b11"):
        assert getattr(rc, k) == pytest.approx(row[k], rel=1e-4)


def test_quadratic_input_gives_zero_coefficients(sv_cm):
    rc = resonant_coeffs(sv_cm.quadratic_only())
    assert rc.as_tuple() == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("s", [0.5, 2.0, 7.0])
def test_threshold_scaling(em_cm, s):
    # cubic terms enter the quartic normal form quadratically, so scaling the
    # cubic part by sqrt(s) and the quartic part by s scales all coefficients by s
    base = thresholds(resonant_coeffs(em_cm))
    scaled = em_cm.scaled_nonlinear(math.sqrt(s), degrees=(3,)).scaled_nonlinear(s, degrees=(4,))
    th = thresholds(resonant_coeffs(scaled))
    for k in ("E_iy", "E_iz", "E_ly", "E_lz"):
        assert getattr(th, k) == pytest.approx(getattr(base, k) / s, rel=1e-10)


def test_exact_resonance_gives_zero_thresholds():
    th = thresholds(ResonantCoeffs(0.1, 0.08, 0.02, 0.1, 1.0, 1.0))
    assert all(v == 0.0 for v in th.as_dict().values())


def test_degenerate_denominator():
    a20, b11 = 0.1, 0.05
    rc = ResonantCoeffs(a20, 0.08, 2 * (a20 + b11), b11, 1.01, 1.0)
    with pytest.raises(DegenerateResonanceError):
        thresholds(rc)


def test_threshold_formulas_by_hand():
    rc = ResonantCoeffs(a20=0.3, a02=0.2, a11=0.1, b11=0.05, omega_p=1.02, omega_v=1.0)
    num = 0.02
    th = thresholds(rc)
    assert th.E_iy == pytest.approx(num / (-0.1 + 2 * (0.3 - 0.05)))
    assert th.E_iz == pytest.approx(num / (-0.4 + 0.1 + 0.1))
    assert th.E_ly == pytest.approx(num / (-0.1 + 2 * (0.3 + 0.05)))
    assert th.E_lz == pytest.approx(num / (-0.4 - 0.1 + 0.1))
    assert th.h_ly == th.E_ly / 1.0


def test_hnew_relations():
    rc = ResonantCoeffs(a20=0.3, a02=0.2, a11=0.1, b11=0.05, omega_p=1.1, omega_v=1.05)
    h = rc.hnew
    w = 1.05
    assert rc.delta == pytest.approx(0.05)
    assert h["delta_tilde"] == pytest.approx(0.05 / w)
    assert h["a"] == pytest.approx((0.3 + 0.2 - 0.1) / w)
    assert h["b"] == pytest.approx(0.2 / w)
    assert h["c"] == pytest.approx((0.1 - 0.4) / w)
    assert h["d"] == pytest.approx(-0.1 / w)


def test_published_thresholds(sv_cm, em_cm, earth_moon):
    assert thresholds(resonant_coeffs(sv_cm)).h_ly == pytest.approx(0.0424, abs=5e-4)
    assert thresholds(resonant_coeffs(em_cm)).h_ly == pytest.approx(0.3069, abs=5e-4)
    em2 = pipeline(earth_moon, 2)[2]
    assert thresholds(resonant_coeffs(em2)).h_ly == pytest.approx(0.3636, abs=5e-4)


def test_sun_vesta_halo_sequence(sv_cm):
    th = thresholds(resonant_coeffs(sv_cm))
    assert th.is_halo_sequence()


def test_normal_form_commutes_with_total_action(sv_cm):
    Z, _ = resonant_normalize(sv_cm, 4)
    E = Series.from_dict(4, 4, {(1, 0, 1, 0): 1.0, (0, 1, 0, 1): 1.0})
    assert poisson_bracket(E, Z).max_abs() <= 1e-12
    # and the angle-dependent part really is resonant
    k = Z.exps[:, :2] - Z.exps[:, 2:]
    assert np.all(k.sum(axis=1) == 0)


def test_normal_form_matches_action_angle_formula(em_cm):
    Z, _ = resonant_normalize(em_cm, 4)
    rc = resonant_coeffs(em_cm)
    H = normal_form_hamiltonian(rc)
    rng = np.random.default_rng(0)
    for _ in range(5):
        I2, I3 = rng.uniform(0.0, 0.1, 2)
        t2, t3 = rng.uniform(0, 2 * np.pi, 2)
        Q2, Q3 = -1j * np.sqrt(I2) * np.exp(1j * t2), -1j * np.sqrt(I3) * np.exp(1j * t3)
        P2, P3 = np.sqrt(I2) * np.exp(-1j * t2), np.sqrt(I3) * np.exp(-1j * t3)
        assert Z(Q2, Q3, P2, P3) == pytest.approx(H(I2, I3, t2, t3), abs=1e-12)


def test_cubic_part_is_not_resonant(sv_cm):
    Z, gens = resonant_normalize(sv_cm, 4)
    assert len(Z.homogeneous(3)) == 0
    assert len(gens) == 2


def test_degree_below_four_is_rejected(sv_cm):
    with pytest.raises(ValueError):
        resonant_normalize(sv_cm, 3)


def test_non_harmonic_quadratic_part_is_rejected(sv_cm):
    bad = Series.from_dict(4, 4, {(2, 0, 0, 0): 0.5, (0, 0, 2, 0): 0.6, (0, 2, 0, 0): 0.5, (0, 0, 0, 2): 0.5})
    cm = type(sv_cm)(sv_cm.omega1, sv_cm.omega2, bad + sv_cm.H.homogeneous(4), 4)
    with pytest.raises(ResonanceError):
        resonant_coeffs(cm)


@pytest.mark.parametrize("psi, kind", [(0.0, "inclined"), (math.pi, "inclined"), (math.pi / 2, "loop"),
                                       (1.5 * math.pi, "loop"), (-math.pi / 2, "loop"), (2 * math.pi, "inclined")])
def test_family_classification(psi, kind):
    assert family_classification(psi) == kind


@settings(max_examples=50)
@given(psi=st.floats(0.0, 2 * math.pi))
def test_family_classification_rejects_other_angles(psi):
    crit = [0.0, math.pi / 2, math.pi, 1.5 * math.pi, 2 * math.pi]
    if min(abs(psi - c) for c in crit) > 1e-6:
        with pytest.raises(ValueError):
            family_classification(psi)
