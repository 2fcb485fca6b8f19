import numpy as np
import pytest

from modelspace.errors import QuadratureError
from modelspace.quadrature import (adaptive_panel_edges, fixed_panels, integrate,
                                   integrate_on_set, panel_points)
from modelspace.sets import MeasurableSet


def test_polynomial_exact():
    v, e = integrate(lambda t: t ** 4, 0, 2)
    assert v == pytest.approx(32 / 5, rel=1e-13)


def test_oscillatory():
    v, _ = integrate(lambda t: np.cos(37 * t), 0, 1, rtol=1e-12)
    assert v == pytest.approx(np.sin(37.0) / 37, rel=1e-11)


def test_near_zero_integral_needs_atol():
    v, _ = integrate(lambda t: np.cos(37 * t), 0, np.pi, rtol=1e-8, atol=1e-13)
    assert v == pytest.approx(np.sin(37 * np.pi) / 37, abs=1e-11)


def test_kink_integrand():
    v, _ = integrate(lambda t: np.abs(t - 0.37), -1, 1, rtol=1e-12)
    want = 0.5 * (1.37 ** 2 + 0.63 ** 2)
    assert v == pytest.approx(want, rel=1e-10)


def test_complex_integrand():
    v, _ = integrate(lambda t: np.exp(1j * t), 0, 1, rtol=1e-13)
    assert v == pytest.approx((np.exp(1j) - 1) / 1j, rel=1e-12)


def test_empty_interval():
    assert integrate(lambda t: t, 1, 1) == (0.0, 0.0)


def test_limit_exhaustion_raises_with_estimate():
    with pytest.raises(QuadratureError) as exc:
        integrate(lambda t: np.abs(t) ** -0.9, 1e-12, 1.0, rtol=1e-14, limit=16)
    assert exc.value.value is not None


def test_integrate_on_set():
    g = MeasurableSet.from_intervals([(0, 1), (2, 3)])
    v, _ = integrate_on_set(lambda t: t, g)
    assert v == pytest.approx(0.5 + 2.5, rel=1e-13)


def test_panel_layout_reusable():
    f = lambda t: 1.0 / (1.0 + t ** 2)
    edges = adaptive_panel_edges(f, -50, 50, rtol=1e-11)
    pts, wts = panel_points(edges)
    assert wts @ f(pts) == pytest.approx(2 * np.arctan(50.0), rel=1e-10)


def test_fixed_panels():
    assert fixed_panels(lambda t: t * t, 0, 1, 4) == pytest.approx(1 / 3, rel=1e-14)
