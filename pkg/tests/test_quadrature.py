import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semiclassical_ensembles.quadrature import QuadratureError, gauss_legendre


def test_polynomial_exact():
    assert gauss_legendre(lambda x: x ** 7 - 3 * x ** 2, -1.0, 2.0) == pytest.approx(255 / 8 - 9, rel=1e-14)


def test_smooth_integrand():
    assert gauss_legendre(np.cos, 0.0, math.pi / 2) == pytest.approx(1.0, abs=1e-13)
    assert gauss_legendre(np.exp, 1.0, 1.0) == 0.0


def test_adaptive_on_endpoint_singularity():
    assert gauss_legendre(np.sqrt, 0.0, 1.0, tol=1e-10) == pytest.approx(2 / 3, abs=1e-10)


def test_budget_exhaustion():
    with pytest.raises(QuadratureError):
        gauss_legendre(lambda x: x ** -0.9, 0.0, 1.0, tol=1e-12, max_panels=5)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-3, 3), w=st.floats(0.1, 4), k=st.floats(0.1, 5))
def test_sine_integrals(a, w, k):
    b = a + w
    exact = (math.cos(k * a) - math.cos(k * b)) / k
    assert gauss_legendre(lambda x: np.sin(k * x), a, b) == pytest.approx(exact, abs=1e-11)
