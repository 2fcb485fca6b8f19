import numpy as np
import pytest

from modelspace.covering import min_subdivision_count
from modelspace.errors import DomainError, EmptyFamilyError
from modelspace.harmonic import (EdgeMeasure, UpperHalfPlaneGrid, harmonic_measure,
                                 harmonic_measure_floor, harmonic_measure_quadrature,
                                 mu_window_ratio, reverse_condition_inf, volberg_inf)
from modelspace.sets import MeasurableSet

EPS = 0.5


def test_omega_half():
    assert harmonic_measure(1j, MeasurableSet.interval(-1, 1)) == pytest.approx(0.5, abs=1e-15)


def test_omega_total_mass():
    z = 0.2 + 1.7j
    for R in (10, 100, 1000):
        w = harmonic_measure(z, MeasurableSet.interval(-R, R))
        assert w < 1
    assert harmonic_measure(z, MeasurableSet.interval(-1e8, 1e8)) == pytest.approx(1.0, abs=1e-7)


def test_omega_translation_invariance():
    g = MeasurableSet.from_intervals([(0, 1), (3, 4.5)])
    x0 = 2.35
    assert harmonic_measure(x0 + 0.8j, g.shift(x0)) == pytest.approx(
        harmonic_measure(0.8j, g), rel=1e-13)


def test_omega_additive_and_complement():
    g = MeasurableSet.from_intervals([(-3, -1), (0, 2)])
    comp = g.complement_within(-50, 50)
    z = 0.5 + 1.2j
    total = harmonic_measure(z, g) + harmonic_measure(z, comp)
    assert total <= 1.0
    assert total == pytest.approx(harmonic_measure(z, MeasurableSet.interval(-50, 50)), rel=1e-12)


def test_omega_domain_error():
    with pytest.raises(DomainError):
        harmonic_measure(1.0 - 0.1j, MeasurableSet.interval(0, 1))


def test_closed_form_vs_quadrature_sweep():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 5))
        pts = np.sort(rng.uniform(-20, 20, 2 * m))
        g = MeasurableSet.from_intervals([(pts[2 * k], pts[2 * k + 1]) for k in range(m)])
        if g.measure == 0:
            continue
        z = complex(rng.uniform(-10, 10), np.exp(rng.uniform(np.log(0.05), np.log(5))))
        a = harmonic_measure(z, g)
        b = harmonic_measure_quadrature(z, g)
        worst = max(worst, abs(a - b))
    assert worst < 1e-8


def test_volberg_full_window(pw_theta):
    # Gamma covering the grid shadow: omega close to 1 high up dominates
    g = MeasurableSet.interval(-100, 100)
    grid = UpperHalfPlaneGrid((-10, 10), (0.01, 10), 24, 24)
    v, z = volberg_inf(pw_theta, g, grid)
    assert v > 0.5


def test_volberg_empty_set(single_zero_theta):
    grid = UpperHalfPlaneGrid((-3, 3), (0.01, 30), 48, 48)
    v, z = volberg_inf(single_zero_theta, MeasurableSet.empty(), grid)
    # reduces to min |Theta| over the grid; small near the zero at i
    assert v < 0.05
    assert abs(z - 1j) < 0.5


def test_volberg_monotone_in_set(pw_theta):
    grid = UpperHalfPlaneGrid((-5, 5), (0.01, 5), 24, 24)
    small = MeasurableSet.interval(0, 1)
    big = MeasurableSet.interval(-3, 3)
    v1, _ = volberg_inf(pw_theta, small, grid)
    v2, _ = volberg_inf(pw_theta, big, grid)
    assert v1 <= v2 + 1e-12


def test_floor_oracle_and_monotonicity():
    assert harmonic_measure_floor(1.0, 1, 1) == pytest.approx(1.0 / (4 * np.pi))
    assert harmonic_measure_floor(0.5, 3, 2) < harmonic_measure_floor(0.9, 3, 2)
    assert harmonic_measure_floor(0.5, 4, 2) < harmonic_measure_floor(0.5, 3, 2)
    assert harmonic_measure_floor(0.5, 3, 3) < harmonic_measure_floor(0.5, 3, 2)


def test_edge_measure_ratios(unit_covering):
    th, cov = unit_covering
    em = EdgeMeasure.from_covering(cov, 4)
    iv = cov.intervals()[3]
    # the segment over I_n sits at height |I_n|/4 < |I_n|
    assert mu_window_ratio(em, iv) == pytest.approx(1.0)
    # candidate below every touched segment height
    tiny = (iv[0], iv[0] + (iv[1] - iv[0]) / 8.0)
    assert mu_window_ratio(em, tiny) == 0.0
    # spanning k whole intervals
    ivs = cov.intervals()
    span = (ivs[2][0], ivs[5][1])
    assert mu_window_ratio(em, span) == pytest.approx(1.0)


def test_reverse_condition_positive(unit_covering):
    th, cov = unit_covering
    n = min_subdivision_count(cov.alpha_hat, 1.0, EPS, 2.0)
    em = EdgeMeasure.from_covering(cov, n)
    inf_v, worst, n_adm = reverse_condition_inf(em, th, EPS, 1.0)
    assert inf_v > 0
    assert n_adm > 0


def test_reverse_condition_empty_family(unit_covering):
    th, cov = unit_covering
    em = EdgeMeasure.from_covering(cov, 4)
    # candidates so small their amplified windows cannot reach the level set
    tiny = [(x, x + 1e-6) for x in np.linspace(-5, 5, 7)]
    with pytest.raises(EmptyFamilyError):
        reverse_condition_inf(em, th, EPS, 1.0, candidates=tiny)


def test_grid_points_positive_y():
    grid = UpperHalfPlaneGrid((-1, 1), (0.1, 10), 4, 4)
    assert np.all(grid.points().imag > 0)
    with pytest.raises(DomainError):
        UpperHalfPlaneGrid((-1, 1), (0, 1))
