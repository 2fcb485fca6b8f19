import numpy as np
import pytest

from modelspace.covering import build_covering
from modelspace.errors import DomainError
from modelspace.inner import InnerFunction
from modelspace.sets import (MeasurableSet, intersect_measure, is_dense, max_gamma,
                             normalize, periodic_set)


def test_normalize_merges_touching():
    s = normalize([(0, 1), (1, 2)])
    assert s.components == ((0.0, 2.0),)


def test_normalize_absorbs_nested():
    s = normalize([(0, 3), (1, 2)])
    assert s.components == ((0.0, 3.0),)


def test_normalize_sorts():
    s = normalize([(5, 6), (0, 1)])
    assert s.components == ((0.0, 1.0), (5.0, 6.0))


def test_normalize_rejects_reversed():
    with pytest.raises(DomainError):
        normalize([(2, 1)])


def test_measure_preserved():
    raw = [(0, 1), (0.5, 2), (3, 4)]
    assert normalize(raw).measure == pytest.approx(3.0)


def test_intersect_measure_oracles():
    g = MeasurableSet.interval(0, 1)
    assert intersect_measure(g, (0.5, 2)) == pytest.approx(0.5)
    assert intersect_measure(g, (2, 3)) == 0.0
    assert intersect_measure(MeasurableSet.interval(-1, 5), (0, 1)) == pytest.approx(1.0)


def test_set_algebra():
    g = MeasurableSet.from_intervals([(0, 1), (2, 3)])
    c = g.complement_within(0, 3)
    assert c.components == ((1.0, 2.0),)
    assert g.intersect(MeasurableSet.interval(0.5, 2.5)).measure == pytest.approx(1.0)
    assert np.array_equal(g.contains(np.array([0.5, 1.5, 2.5])), [True, False, True])


def test_max_gamma_full_window(pw_theta, pw_covering):
    span = pw_covering.covered_span
    g, n = max_gamma(MeasurableSet.interval(*span), pw_covering, 1)
    assert g == pytest.approx(1.0)


def test_max_gamma_periodic_quarters(pw_theta):
    # uniform covering aligned to Z: theta = exp(i ln 2 z) gives |I_n| = 1 at c = 1
    th = InnerFunction(tau=np.log(2.0))
    cov = build_covering(th, 0.5, 1.0, (-8, 8))
    assert np.allclose(cov.lengths(), 1.0, rtol=1e-9)
    g = periodic_set(0.25, 1.0, cov.window)
    gstar, _ = max_gamma(g, cov, 1)
    assert gstar == pytest.approx(0.25, rel=1e-6)


def test_is_dense_boundary_convention(unit_covering):
    th, cov = unit_covering
    g = periodic_set(0.5, 1.0, cov.window)
    gstar, _ = max_gamma(g, cov, 1)
    assert 0 < gstar < 1
    rep = is_dense(g, cov, gstar, 1)  # non-strict inequality
    assert rep.dense
    rep2 = is_dense(g, cov, gstar * (1 + 1e-9), 1)
    assert not rep2.dense and rep2.violations


def test_gamma_zero_always_dense(pw_covering):
    rep = is_dense(MeasurableSet.interval(0, 0.1), pw_covering, 1e-12, 1)
    assert rep.gamma_star >= 0.0


def test_monotone_in_set(pw_covering):
    g1 = periodic_set(0.25, 1.0, pw_covering.window)
    g2 = periodic_set(0.5, 1.0, pw_covering.window)
    a1, _ = max_gamma(g1, pw_covering, 2)
    a2, _ = max_gamma(g2, pw_covering, 2)
    assert a1 <= a2 + 1e-15


def test_translation_covariance():
    th = InnerFunction(tau=np.log(2.0))
    cov = build_covering(th, 0.5, 1.0, (-8, 8))
    cov_shift = build_covering(th, 0.5, 1.0, (-8 + 0.3, 8 + 0.3), anchor=0.3)
    g = periodic_set(0.25, 1.0, cov.window)
    a1, _ = max_gamma(g, cov, 1)
    a2, _ = max_gamma(g.shift(0.3), cov_shift, 1)
    assert a1 == pytest.approx(a2, abs=1e-9)


def test_amplified_mass_nondecreasing(geometric_theta, geometric_covering):
    """gamma*(a) * a * |I_worst| cannot decrease when the window grows."""
    g = MeasurableSet.interval(-1e4, 0.0)
    prev = -np.inf
    for a in (1, 2, 4, 8):
        gstar, n = max_gamma(g, geometric_covering, a)
        iv = geometric_covering.intervals()[n]
        mass = gstar * a * (iv[1] - iv[0])
        assert mass >= prev - 1e-12
        prev = mass


def test_json_fragment():
    g = MeasurableSet.from_intervals([(0, 1), (2, 3)])
    assert MeasurableSet.from_list(g.to_list()) == g
