import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from semiclassical_ensembles import potentials as pot


def test_amplitude_landmarks(semicircle, hirota, lpd):
    assert pot.amplitude(semicircle, 0.0) == pytest.approx(1.0, abs=1e-14)
    assert pot.amplitude(semicircle, 0.5) == 0.0
    assert pot.amplitude(semicircle, -0.5) == 0.0
    assert pot.amplitude(semicircle, 0.7) == 0.0
    assert pot.amplitude(hirota, 1 / 6) == pytest.approx(1.0, abs=1e-12)
    assert pot.amplitude(lpd, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert pot.amplitude(lpd, 0.5) == pytest.approx(0.0, abs=1e-12)


def test_constructor_validation():
    with pytest.raises(pot.FamilyError):
        pot.make_hirota(1.0, -0.5, 0.5, 1.0)
    with pytest.raises(pot.FamilyError):
        pot.make_lpd(1.0, -0.5, 0.5, -0.5)
    with pytest.raises(pot.FamilyError):
        pot.make_interpolation(1.5)
    with pytest.raises(pot.FamilyError):
        pot.make_semicircle(1.0, 0.5, -0.5)
    with pytest.raises(pot.FamilyError):
        pot.make_semicircle(0.0)


def test_inverse_branches_semicircle_closed_form():
    fam = pot.make_semicircle(1.0, -1.0, 1.0)
    xm, xp = pot.inverse_branches(fam, 0.6)
    assert (xm, xp) == pytest.approx((-0.8, 0.8), abs=1e-13)


def test_branch_limits(hirota):
    xm, xp = pot.inverse_branches(hirota, 1e-9)
    assert xm == pytest.approx(-0.5, abs=1e-6) and xp == pytest.approx(0.5, abs=1e-6)
    xm, xp = pot.inverse_branches(hirota, 1.0 - 1e-10)
    assert xm == pytest.approx(hirota.x0, abs=1e-4) and xp == pytest.approx(hirota.x0, abs=1e-4)


def test_phase_integral_values(semicircle, lpd, named_families):
    assert pot.phase_integral(semicircle, 0.0) == pytest.approx(math.pi / 4, abs=1e-14)
    assert pot.phase_integral(lpd, 0.0) == pytest.approx(3 * math.pi / 14, abs=1e-13)
    for fam in named_families.values():
        assert abs(pot.phase_integral(fam, fam.A_max)) <= 1e-10


def test_tail_integral_values(semicircle, hirota, lpd):
    for s in (0.1, 0.5, 0.9):
        assert pot.tail_integral(semicircle, s) == pytest.approx(0.0, abs=1e-14)
        assert pot.tail_integral(lpd, s) == pytest.approx(0.0, abs=1e-14)
    assert pot.tail_integral(hirota, 1.0) == pytest.approx(2 / 9, abs=1e-13)
    assert pot.tail_integral(hirota, 0.0) == 0.0


def test_density_values(semicircle):
    assert pot.density(semicircle, 0.4) == pytest.approx(0.2, abs=1e-14)
    d0, d1 = pot.make_interpolation(0.0), pot.make_interpolation(1.0)
    for s in (0.1, 0.3, 0.45):
        assert pot.density(d0, s) == pytest.approx(s, abs=1e-14)
        assert pot.density(d1, s) == pytest.approx(1.0, abs=1e-14)


def test_hirota_coefficients(hirota):
    si = pot.spectral_integrals(hirota)
    assert si.xi[1] == pytest.approx(2 / 9, abs=1e-15)
    assert si.xi[0] == pytest.approx(-(hirota.X_plus + hirota.X_minus), abs=1e-15)
    assert si.phi[0] > 0 and si.phi[1] > 0


def test_hirota_small_xi_tends_to_semicircle(semicircle):
    x = np.linspace(-0.45, 0.45, 7)
    a0 = pot.amplitude(semicircle, x)
    errs = [np.max(np.abs(pot.amplitude(pot.make_hirota(1.0, -0.5, 0.5, xi), x) - a0))
            for xi in (1e-2, 1e-3)]
    assert errs[1] < errs[0] / 5


def test_lpd_gamma_zero_is_semicircle(semicircle):
    fam = pot.make_lpd(1.0, -0.5, 0.5, 0.0)
    x = np.linspace(-0.5, 0.5, 21)
    assert np.allclose(pot.amplitude(fam, x), pot.amplitude(semicircle, x), atol=1e-13)


def test_interpolation_family():
    assert pot.interpolation_coefficients(0.0)[1:] == (0.0, 1.0)
    assert pot.make_interpolation(0.5).A_max == 0.75
    for d in (0.0, 0.25, 0.5, 0.75, 1.0):
        assert pot.l1_norm(pot.make_interpolation(d)) == pytest.approx(math.pi / 2, abs=1e-8)


def test_l1_norm_against_direct_quadrature(hirota):
    direct = quad(lambda x: float(pot.amplitude(hirota, x)), -0.5, 0.5, epsabs=1e-13, limit=200)[0]
    assert pot.l1_norm(hirota) == pytest.approx(direct, abs=1e-10)


@pytest.mark.parametrize("kind", ["hirota", "lpd"])
def test_closed_forms_match_quadrature(named_families, kind):
    fam = named_families[kind]
    for s in (0.05, 0.3, 0.7, 0.95):
        assert pot.phase_integral(fam, s) == pytest.approx(pot.phase_integral_quadrature(fam, s), abs=1e-10)
        assert pot.tail_integral(fam, s) == pytest.approx(pot.tail_integral_quadrature(fam, s), abs=1e-10)


def test_polynomial_family_reductions(semicircle, hirota):
    si = pot.spectral_integrals(semicircle)
    base = pot.polynomial_family(si.phi[0], 1.0)
    assert (base.X_minus, base.X_plus) == pytest.approx((-0.5, 0.5), abs=1e-14)
    b1 = 0.5
    gam = 4 * b1 / (3 + b1)
    lp = pot.make_lpd(1.0, -0.5, 0.5, gam)
    lsi = pot.spectral_integrals(lp)
    poly = pot.polynomial_family(lsi.phi[0], 1.0, [b1])
    x = np.linspace(-0.49, 0.49, 9)
    assert np.allclose(pot.amplitude(poly, x), pot.amplitude(lp, x), atol=1e-10)
    hsi = pot.spectral_integrals(hirota)
    ph = pot.polynomial_family(hsi.phi[0], 1.0, [], hsi.xi[0], [2 / 9])
    assert np.allclose(pot.amplitude(ph, x), pot.amplitude(hirota, x), atol=1e-10)


def test_family_serialization_round_trip(named_families):
    fams = list(named_families.values()) + [pot.make_interpolation(0.3)]
    for fam in fams:
        assert pot.family_from_dict(fam.to_dict()) == fam
    with pytest.raises(pot.FamilyError):
        pot.family_from_dict({"kind": "hirota", "A_max": 1})


def test_recover_branches_linear_tail_is_symmetric(semicircle):
    for s in (0.2, 0.5, 0.8):
        xm, xp = pot.recover_branches(lambda v: pot.phase_integral(semicircle, v),
                                      lambda v: pot.tail_integral(semicircle, v), 1.0, s)
        assert xm + xp == pytest.approx(semicircle.X_minus + semicircle.X_plus, abs=1e-10)


@pytest.mark.parametrize("kind", ["semicircle", "hirota", "lpd"])
def test_recover_branches_round_trip(named_families, kind):
    fam = named_families[kind]
    for s in np.linspace(0.03, 0.97, 20):
        got = pot.recover_branches(lambda v: pot.phase_integral(fam, v),
                                   lambda v: pot.tail_integral(fam, v), fam.A_max, s)
        assert got == pytest.approx(pot.inverse_branches(fam, s), abs=1e-8)


@pytest.mark.parametrize("kind", ["semicircle", "hirota", "lpd"])
def test_branch_and_phase_monotonicity(named_families, kind):
    fam = named_families[kind]
    s = np.linspace(0.01, 0.99, 99)
    xm, xp = pot.inverse_branches(fam, s)
    assert np.all(xm < xp)
    assert np.all(np.diff(xm) > 0) and np.all(np.diff(xp) < 0)
    phi = np.array([pot.phase_integral(fam, v) for v in s])
    assert np.all(np.diff(phi) < 0)


def test_tail_oddness_and_slope(hirota):
    for s in (0.1, 0.4, 0.9):
        assert pot.tail_integral(hirota, s) + pot.tail_integral(hirota, -s) == pytest.approx(0.0, abs=1e-15)
    h = 1e-5
    slope = (pot.tail_integral(hirota, h) - pot.tail_integral(hirota, -h)) / (2 * h)
    assert slope == pytest.approx(hirota.X_plus + hirota.X_minus, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(xi=st.floats(-0.9, 0.9), s=st.floats(0.02, 0.98))
def test_hirota_branches_invert_amplitude(xi, s):
    fam = pot.make_hirota(1.0, -0.5, 0.5, xi)
    xm, xp = pot.inverse_branches(fam, s)
    assert pot.amplitude(fam, xm) == pytest.approx(s, abs=1e-9)
    assert pot.amplitude(fam, xp) == pytest.approx(s, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(gamma=st.floats(-0.45, 0.95), x=st.floats(-0.5, 0.5))
def test_lpd_amplitude_bounded(gamma, x):
    fam = pot.make_lpd(1.0, -0.5, 0.5, gamma)
    a = pot.amplitude(fam, x)
    assert 0.0 <= a <= 1.0 + 1e-12
