import math

import pytest

from semiclassical_ensembles import ensemble as en
from semiclassical_ensembles import focusing as fo
from semiclassical_ensembles import potentials as pot
from semiclassical_ensembles import scattering as sc


def test_nu_values(semicircle, hirota, lpd):
    assert fo.nu(semicircle) == pytest.approx(1 / 12, rel=1e-10)
    assert fo.nu(hirota) == pytest.approx(1 / 12, rel=1e-10)
    assert fo.nu(lpd) == pytest.approx((5 - 2 * 4 / 7) / 60, rel=1e-10)


def test_nu_lpd_scales_with_amplitude_squared():
    for A in (0.5, 2.0):
        fam = pot.make_lpd(A, -0.5, 0.5, 0.3)
        assert fo.nu(fam) == pytest.approx(fo.nu_closed_form(fam), rel=1e-10)
        assert fo.nu(fam) == pytest.approx((5 - 0.6) * A * A / 60, rel=1e-10)


def test_focus_x_is_support_midpoint(named_families):
    for fam in list(named_families.values()) + [pot.make_hirota(1.0, -0.2, 0.6, -0.4)]:
        for K in (-1, 0, 2):
            assert fo.focus_point(fam, K).x0 == pytest.approx(fam.midpoint, abs=1e-14)


def test_semicircle_focus_times(semicircle):
    assert fo.focus_point(semicircle, -1).t0[0] == pytest.approx(math.pi / 8, abs=1e-14)
    assert fo.focus_point(semicircle, 0).t0[0] == pytest.approx(-math.pi / 8, abs=1e-14)


def test_interpolation_family_has_no_lattice():
    with pytest.raises(fo.FocusError):
        fo.focus_point(pot.make_interpolation(0.5), 0)


def test_quantization_conditions():
    a3 = fo.hirota_a3(1.0, 1.0, 2 / 3, 0)
    assert a3 == pytest.approx(8 / (9 * math.pi), rel=1e-15)
    assert fo.check_condition("hirota", a2=1.0, a3=a3, A_max=1.0, xi=2 / 3, K=0)
    assert not fo.check_condition("hirota", a2=1.0, a3=1.5 * a3, A_max=1.0, xi=2 / 3, K=0)
    a4 = fo.lpd_a4(1.0, 1.0, 4 / 7)
    assert a4 == pytest.approx(1 / 3, rel=1e-15)
    assert fo.check_condition("lpd", a2=1.0, a4=a4, A_max=1.0, gamma=4 / 7)
    with pytest.raises(fo.FocusError):
        fo.check_condition("nls", a2=1.0)


def test_mixture_matches_conditions(hirota, lpd):
    si = pot.spectral_integrals(hirota)
    mix = fo.mixture_coefficients(hirota, 0, -2 / si.phi[1])
    assert mix.a[0] == pytest.approx(1.0, rel=1e-14)
    assert mix.a[1] == pytest.approx(8 / (9 * math.pi), rel=1e-12)
    lsi = pot.spectral_integrals(lpd)
    lmix = fo.mixture_coefficients(lpd, 0, -2 / lsi.phi[1])
    assert lmix.periodic and lmix.a[1] == 0.0
    assert lmix.a[2] / lmix.a[0] == pytest.approx(1 / 3, rel=1e-12)
    # the mixture passes through the focus point at t_focus
    ev = fo.focus_point(hirota, 0)
    assert mix.times(mix.t_focus).resolved == pytest.approx(ev.t0, abs=1e-14)


def test_window_origin_is_focus(semicircle):
    ev = fo.focus_point(semicircle, -1, 10)
    x, mt = fo.local_window(ev)
    assert x == ev.x0 and mt.resolved == ev.t0
    x, mt = fo.local_window(ev, 1.0, {2: 1.0})
    assert x - ev.x0 == pytest.approx(ev.epsilon ** 2 / ev.nu)
    assert mt.resolved[0] - ev.t0[0] == pytest.approx(ev.epsilon ** 3 / ev.nu ** 2)
    with pytest.raises(fo.FocusError):
        fo.local_window(ev, 0.0, {3: 1.0})


def test_pure_flow_shift(hirota):
    ev = fo.focus_point(hirota, 0)
    assert fo.pure_flow_shift(ev, 3, 0.0).resolved == ev.t0
    shifted = fo.pure_flow_shift(ev, 3, ev.t0[1]).resolved
    assert shifted[0] == ev.t0[0] and shifted[1] == 0.0


def test_mkdv_data_is_imaginary(hirota):
    ev = fo.focus_point(hirota, 0)
    spec = sc.spectral_data(hirota, 10)
    mt = fo.pure_flow_shift(ev, 3, ev.t0[1])
    for x in (-0.6, -0.1, 0.0, 0.3, 0.7):
        v = en.evaluate(spec, x, mt).psi
        assert abs(v.real) <= 1e-8 * (1 + abs(v))


def test_peak_small_ensemble(semicircle):
    spec = sc.spectral_data(semicircle, 6)
    ev = fo.focus_point(semicircle, -1, 6)
    rep = fo.peak_check(spec, ev, points=9)
    assert rep.failures == 0
    assert rep.argmax == (0.0, 0.0)
    assert 0.8 <= rep.r <= 1.2
    assert rep.phase_error < 1e-8  # centre value is i (-1)^(K+N) |psi|


def test_even_flow_peaks_symmetric_in_K(semicircle):
    spec = sc.spectral_data(semicircle, 6)
    r = [fo.peak_check(spec, fo.focus_point(semicircle, K, 6), points=9).r for K in (-1, 0)]
    assert r[0] == pytest.approx(r[1], rel=0.1)


def test_sign_factor_alternates(semicircle):
    for N in (5, 6):
        ev = fo.focus_point(semicircle, -1, N)
        v = en.evaluate(sc.spectral_data(semicircle, N), ev.x0, ev.t0).psi
        assert abs(v.real) <= 1e-8 * abs(v)
        assert math.copysign(1, v.imag) == ev.sign
