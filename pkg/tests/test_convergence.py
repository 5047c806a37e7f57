import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semiclassical_ensembles import convergence as cv
from semiclassical_ensembles import scattering as sc


def test_exact_power_law_recovered():
    eps = np.array([1 / 80, 1 / 120, 1 / 160])
    rep = cv.fit_power_law(eps, 3.0 * eps ** 0.5)
    assert rep.exponent == pytest.approx(0.5, abs=1e-12)
    assert rep.prefactor == pytest.approx(3.0, rel=1e-10)
    assert rep.residual < 1e-12


@settings(max_examples=30, deadline=None)
@given(p=st.floats(-1.0, 4.0), c=st.floats(1e-3, 1e3))
def test_power_law_property(p, c):
    eps = np.geomspace(1e-3, 1e-1, 5)
    assert cv.fit_power_law(eps, c * eps ** p).exponent == pytest.approx(p, abs=1e-10)


def test_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        cv.fit_power_law([0.1, 0.2], [1.0, 2.0])
    with pytest.raises(ValueError):
        cv.fit_power_law([0.1, 0.2, 0.3], [1.0, 0.0, 2.0])
    with pytest.raises(ValueError):
        cv.converge_fit(None, [10, 20], cv.HIROTA_INTERIOR)


def test_sup_error_small_case(hirota):
    spec = sc.spectral_data(hirota, 6)
    err, where = cv.sup_error(spec, ((-0.3, 0.3),), per_eps=4)
    assert 0 < err < 0.5 and -0.3 <= where <= 0.3


def test_interior_exponent_near_half(hirota):
    rep = cv.converge_fit(hirota, (20, 30, 40), cv.HIROTA_INTERIOR)
    assert 0.35 <= rep.exponent <= 0.65
    assert len(rep.samples) == 3
