"""Independent brute-force cross-checks of the main numerical oracles.

These are deliberately dumb reimplementations (dense grids, direct
minimization) used only to confront the production paths on small
instances.
"""

import numpy as np
import pytest
import warnings

from modelspace.covering import build_covering, build_reference_set
from modelspace.errors import DomainError
from modelspace.geometry import SublevelDistance
from modelspace.inner import InnerFunction
from modelspace.sampling import empirical_sampling_constant, FamilySpec
from modelspace.sets import MeasurableSet, intersect_measure, periodic_set
from modelspace.spaces import (QuadratureSpec, TestFunction, derivative_via_kernel,
                               remez_check)

EPS = 0.5


def brute_distance(theta, eps, x, box, n=900):
    """Dense-grid minimum distance to {|Theta| < eps}; no refinement."""
    xs = np.linspace(box[0], box[1], n)
    ys = np.geomspace(box[2], box[3], n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = X + 1j * Y
    inside = theta.log_modulus(Z) < np.log(eps)
    pts = Z[inside]
    return float(np.min(np.abs(pts - x)))


@pytest.mark.parametrize("zeros,tau", [
    ([1j, 4 + 2j], 0.3),
    ([0.5 + 0.4j, -1 + 1.5j, 2 + 0.8j], 0.0),
    ([], 1.2),
])
def test_distance_against_brute_force(zeros, tau):
    th = InnerFunction.from_zeros(zeros, tau=tau)
    dist = SublevelDistance(th, EPS, window=(-6, 8))
    for x in (-3.0, 0.0, 1.2, 4.5):
        fast = float(dist(x))
        brute = brute_distance(th, EPS, x, (-9, 11, 1e-3, 30))
        # the brute grid only sees interior points, so it overestimates
        assert fast <= brute + 1e-9
        assert fast >= brute - 0.05  # grid spacing slack


def test_alpha_hat_certifies_lengths(two_zero_theta):
    cov = build_covering(two_zero_theta, EPS, 1.0, (-8, 12))
    dist = SublevelDistance(two_zero_theta, EPS, window=(-8, 12))
    for (lo, hi) in cov.intervals():
        xs = np.linspace(lo, hi, 33, endpoint=False)
        d = dist(xs)
        L = hi - lo
        assert np.all(L <= cov.alpha_hat * d * (1 + 1e-9))
        assert np.all(L >= d / cov.alpha_hat * (1 - 1e-9))


def test_reference_set_on_geometric_covering(geometric_theta, geometric_covering):
    g = MeasurableSet.interval(-1e4, 0.0)
    gstar = 0.05
    ref, plan = build_reference_set(geometric_covering, g, 4, 3, gstar)
    assert plan.skipped  # amplified edge intervals leave the tiled span
    assert ref.measure > 0
    for n, tiles in plan.tiles.items():
        for lo, hi in tiles:
            assert intersect_measure(g, (lo, hi)) >= 0.5 * gstar * (hi - lo) * (1 - 1e-9)


def test_derivative_via_kernel_second_order(pw_theta):
    f = TestFunction(pw_theta, (0.3 + 0.8j,), (1.0,))
    spec = QuadratureSpec(window=(-400, 400))
    d2 = derivative_via_kernel(f, 2, 0.25, spec)
    assert abs(d2 - complex(f.derivative(2, 0.25))) < 1e-6


def test_remez_rejects_e_outside_j(pw_theta):
    f = TestFunction(pw_theta, (0.5 + 8j,), (1.0,))
    with pytest.raises(DomainError):
        remez_check(f, (0.0, 1.0), MeasurableSet.interval(0.5, 1.5), 2.0)


def test_distance_across_saddle_level():
    """Two equal-height zeros create a critical point of |Theta| between
    them; the level curve pinches there.  Both the two-oval (eps below
    the saddle value) and merged (eps above) regimes must agree with a
    dense brute-force scan."""
    th = InnerFunction.from_zeros([-1 + 1j, 1 + 1j])
    ys = np.linspace(0.3, 3, 2001)
    saddle = float(np.min(np.exp(th.log_modulus(1j * ys))))
    gx = np.linspace(-6, 6, 1200)
    gy = np.geomspace(1e-3, 12, 1200)
    GX, GY = np.meshgrid(gx, gy, indexing="ij")
    Z = GX + 1j * GY
    for eps in (saddle * 0.98, saddle * 1.02):
        dist = SublevelDistance(th, eps, window=(-5, 5))
        pts = Z[th.log_modulus(Z) < np.log(eps)]
        for x in (-4.0, -1.0, 0.0, 0.7, 3.5):
            fast = float(dist(x))
            brute = float(np.min(np.abs(pts - x)))
            assert fast <= brute + 1e-9
            assert fast >= brute - 0.06


def test_covering_anchor_at_window_edge(pw_theta):
    cov = build_covering(pw_theta, EPS, 1.0, (-10, 10), anchor=-10.0)
    assert cov.breakpoints[0] == -10.0
    assert cov.dropped_left is None
    want = np.log(1 / EPS) / pw_theta.tau
    assert np.allclose(cov.lengths(), want, rtol=1e-6)


def test_measurable_set_random_algebra():
    """Randomized merge/intersect consistency against an integer-grid model."""
    rng = np.random.default_rng(12)
    scale = 400  # grid cells per unit
    for _ in range(50):
        m = int(rng.integers(1, 6))
        ends = rng.integers(0, 20 * scale, size=(m, 2))
        raw = [(min(a, b) / scale, (max(a, b) + 1) / scale) for a, b in ends]
        s = MeasurableSet.from_intervals(raw)
        grid = np.zeros(21 * scale, dtype=bool)
        for a, b in raw:
            grid[int(round(a * scale)):int(round(b * scale))] = True
        assert s.measure == pytest.approx(grid.sum() / scale, abs=1e-9)
        # pairwise disjoint and sorted
        comps = s.components
        assert all(c[1] > c[0] for c in comps)
        assert all(comps[k][1] < comps[k + 1][0] or comps[k][1] == comps[k + 1][0] - 0
                   for k in range(len(comps) - 1))
        assert all(comps[k][1] < comps[k + 1][0] for k in range(len(comps) - 1))
        lo, hi = 3.0, 11.0
        got = intersect_measure(s, (lo, hi))
        want = grid[int(lo * scale):int(hi * scale)].sum() / scale
        assert got == pytest.approx(want, abs=1e-9)


def test_sampling_threaded_matches_serial(pw_theta):
    spec = QuadratureSpec(window=(-40, 40))
    g = periodic_set(0.25, 1.0, spec.window)
    fam = FamilySpec(n_sets=4, max_nodes=3, seed=8)
    e1 = empirical_sampling_constant(pw_theta, g, 2.0, spec=spec, fam_spec=fam, jobs=1)
    e2 = empirical_sampling_constant(pw_theta, g, 2.0, spec=spec, fam_spec=fam, jobs=3)
    assert e1.value == e2.value
    assert e1.per_set == e2.per_set


def test_sampling_regularized_path_warns(pw_theta):
    spec = QuadratureSpec(window=(-40, 40))
    g = periodic_set(0.5, 1.0, spec.window)
    lam = 0.4 + 0.9j
    # duplicated nodes make every Gram singular; the solve must still finish
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = empirical_sampling_constant(pw_theta, g, 2.0, family=[(lam, lam)],
                                          spec=spec, fam_spec=FamilySpec(n_sets=0))
    assert est.value >= 1.0 - 1e-9
    assert est.regularized
    assert any("regularized" in str(w.message) for w in caught)
