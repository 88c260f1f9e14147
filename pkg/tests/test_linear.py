import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halobif.equilibria import locate_collinear
from halobif.linear import (
    CharacterError,
    ScalingError,
    UnsupportedPointError,
    characteristic_polynomial,
    check_saddle_center,
    frequencies,
    linearize,
    planar_matrix,
    stability_coeffs,
    symplectic_basis,
    symplectic_form,
)
from halobif.params import build_params, load_case


def lin_for(name, j=1, **kw):
    p = load_case(name, **kw)
    return p, linearize(p, locate_collinear(p, j))


def quadratic_matrix(lin):
    """Hessian of the quadratic local Hamiltonian in (x, y, z, px, py, pz)."""
    n = lin.n
    S = np.zeros((6, 6))
    S[0, 0], S[1, 1], S[2, 2] = 2 * lin.a, lin.b, lin.c
    S[3, 3] = S[4, 4] = S[5, 5] = 1.0
    S[1, 3] = S[3, 1] = n
    S[0, 4] = S[4, 0] = -n
    return S


def test_earth_moon_values():
    _, lin = lin_for("earth-moon")
    assert (lin.a, lin.b, lin.c) == pytest.approx((-5.14772, 5.14772, 5.14772), rel=1e-5)
    assert (lin.lambda1, lin.omega1, lin.omega2) == pytest.approx((2.9321, 2.33441, 2.26886), rel=1e-4)
    assert (lin.s1, lin.s2) == pytest.approx((14.9084, 23.4324), rel=1e-5)


def test_sun_vesta_values():
    _, lin = lin_for("sun-vesta")
    assert (lin.a, lin.b, lin.c) == pytest.approx((-1.00363, 1.00363, 1.00363), rel=1e-5)
    assert (lin.lambda1, lin.omega1, lin.omega2) == pytest.approx((0.10407, 1.0036, 1.00181), rel=1e-4)
    assert (lin.s1, lin.s2) == pytest.approx((0.79682, 2.02523), rel=1e-5)
    assert bool(check_saddle_center(lin.a, lin.b, lin.c, lin.n))


def test_sun_barycenter_frequencies():
    _, lin = lin_for("sun-barycenter")
    assert (lin.lambda1, lin.omega1, lin.omega2) == pytest.approx((2.13994, 1.85169, 1.77498), rel=1e-5)


@pytest.mark.parametrize("name", ["earth-moon", "sun-barycenter", "sun-vesta"])
@pytest.mark.parametrize("j", [1, 2])
def test_structural_identities(name, j):
    p, lin = lin_for(name, j)
    ulp = 4 * np.finfo(float).eps * lin.b
    assert abs(lin.a + lin.b + lin.Delta) <= ulp
    assert abs(lin.c - lin.b - 2 * lin.Delta) <= ulp
    assert lin.b > 0 and lin.Delta > 0
    assert lin.d_lambda1 > 0 and lin.d_omega1 > 0
    assert lin.lambda1**2 == pytest.approx(lin.eta2, rel=1e-14)
    assert lin.omega1**2 == pytest.approx(-lin.eta1, rel=1e-14)
    assert lin.omega2 == pytest.approx(np.sqrt(lin.c), rel=1e-15)
    assert lin.symplecticity_error() <= 1e-10
    check = check_saddle_center(lin.a, lin.b, lin.c, lin.n)
    assert check and check.sufficient


@pytest.mark.parametrize("name", ["earth-moon", "sun-vesta"])
def test_characteristic_roots_match_eigenvalues(name):
    _, lin = lin_for(name)
    ev = np.linalg.eigvals(planar_matrix(lin.a, lin.b, lin.n))
    real = np.sort(np.abs(ev[np.abs(ev.imag) < 1e-9].real))
    imag = np.sort(np.abs(ev[np.abs(ev.imag) >= 1e-9].imag))
    assert real == pytest.approx([lin.lambda1] * 2, rel=1e-10)
    assert imag == pytest.approx([lin.omega1] * 2, rel=1e-10)
    scale = lin.lambda1**4 + lin.omega1**4
    assert abs(characteristic_polynomial(lin.lambda1, lin.a, lin.b, lin.n)) <= 1e-10 * scale
    assert abs(characteristic_polynomial(1j * lin.omega1, lin.a, lin.b, lin.n)) <= 1e-10 * scale


@pytest.mark.parametrize("name", ["earth-moon", "sun-barycenter", "sun-vesta"])
def test_basis_diagonalizes_quadratic_part(name):
    _, lin = lin_for(name)
    S = lin.C.T @ quadratic_matrix(lin) @ lin.C
    expected = np.zeros((6, 6))
    expected[0, 3] = expected[3, 0] = lin.lambda1
    expected[1, 1] = expected[4, 4] = lin.omega1
    expected[2, 2] = expected[5, 5] = lin.omega2
    assert np.max(np.abs(S - expected)) <= 1e-10 * max(1.0, lin.lambda1)


def test_symplectic_basis_signature():
    _, lin = lin_for("earth-moon")
    C, s1, s2 = symplectic_basis(lin.a, lin.b, lin.n, lin.lambda1, lin.omega1, lin.omega2)
    assert np.array_equal(C, lin.C) and (s1, s2) == (lin.s1, lin.s2)
    with pytest.raises(ScalingError):
        symplectic_basis(lin.a, lin.b, lin.n, -lin.lambda1, lin.omega1, lin.omega2)


def test_zero_oblateness_gives_equal_coefficients():
    p = build_params(0.01, 0.02, 0.0)
    a, b, c, D = stability_coeffs(p, locate_collinear(p, 1))
    assert D == 0.0 and c - b == 0.0 and a + b == 0.0


def test_saddle_center_rejects_weak_b():
    n = 1.0
    check = check_saddle_center(-0.5, 0.5, 0.5, n)
    assert not check and not check.sufficient
    with pytest.raises(CharacterError):
        frequencies(-0.5, 0.5, 0.5, n)


def test_l3_not_supported():
    p = load_case("earth-moon")
    with pytest.raises(UnsupportedPointError):
        stability_coeffs(p, locate_collinear(p, 3))


@settings(max_examples=40, deadline=None)
@given(mu=st.floats(1e-9, 0.5), beta=st.floats(0.0, 0.3), A=st.floats(0.0, 1e-6), j=st.sampled_from([1, 2]))
def test_symplectic_for_random_parameters(mu, beta, A, j):
    p = build_params(mu, beta, A)
    lin = linearize(p, locate_collinear(p, j))
    J = symplectic_form(3)
    scale = max(1.0, np.max(np.abs(lin.C)) ** 2)
    assert np.max(np.abs(lin.C.T @ J @ lin.C - J)) <= 1e-10 * scale
