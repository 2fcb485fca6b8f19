import numpy as np
import pytest

from modelspace.covering import (amplify, build_covering, build_reference_set,
                                 defining_integrals, min_subdivision_count, subdivide)
from modelspace.errors import DensityError, DomainError, WindowTooSmallError
from modelspace.sets import MeasurableSet, intersect_measure, periodic_set

EPS = 0.5


def test_pw_lengths_closed_form(pw_theta, pw_covering):
    want = 1.0 * np.log(1 / EPS) / pw_theta.tau
    L = pw_covering.lengths()
    assert np.max(np.abs(L - want) / want) < 1e-6


def test_partition_exact(pw_covering):
    bp = np.asarray(pw_covering.breakpoints)
    assert np.all(np.diff(bp) > 0)
    ivs = pw_covering.intervals()
    for a, b in zip(ivs[:-1], ivs[1:]):
        assert a[1] == b[0]  # half-open pieces meet exactly


def test_defining_integral_invariant(pw_theta, pw_covering):
    ints = defining_integrals(pw_theta, pw_covering, 128)
    assert np.max(np.abs(ints - pw_covering.c)) <= 1e-6 * pw_covering.c


def test_defining_integral_with_kinks(two_zero_theta):
    cov = build_covering(two_zero_theta, EPS, 1.0, (-8, 12))
    i1 = defining_integrals(two_zero_theta, cov, 256)
    i2 = defining_integrals(two_zero_theta, cov, 512)
    assert np.max(np.abs(i1 - 1.0)) <= 1e-6
    assert np.max(np.abs(i2 - 1.0)) <= 1e-6


def test_c_scaling(pw_theta):
    cov1 = build_covering(pw_theta, EPS, 0.25, (-4, 4))
    want = 0.25 * np.log(1 / EPS) / pw_theta.tau
    assert np.max(np.abs(cov1.lengths() - want) / want) < 1e-6


def test_geometric_breakpoints(geometric_theta, geometric_covering):
    """Stolz-angle instance: interval lengths grow geometrically with |x|."""
    bp = np.asarray(geometric_covering.breakpoints)
    L = geometric_covering.lengths()
    mask = bp[:-1] >= 10
    ratios = (L[1:] / L[:-1])[mask[1:]]
    assert ratios.min() > 1.05
    assert ratios.max() / ratios.min() < 1.3  # a tight geometric band


def test_neighbor_comparability_band(geometric_covering):
    L = geometric_covering.lengths()
    ratios = L[1:] / L[:-1]
    band = geometric_covering.alpha_hat ** 3
    assert np.all(ratios <= band) and np.all(ratios >= 1.0 / band)


def test_anchor_shift_compatibility(two_zero_theta):
    """Two coverings from different anchors assign comparable lengths at any x."""
    cov0 = build_covering(two_zero_theta, EPS, 1.0, (-8, 12), anchor=0.0)
    cov1 = build_covering(two_zero_theta, EPS, 1.0, (-8, 12), anchor=1.7)
    band = (max(cov0.alpha_hat, cov1.alpha_hat)) ** 2
    bp0, bp1 = np.asarray(cov0.breakpoints), np.asarray(cov1.breakpoints)
    for x in np.linspace(-5, 9, 40):
        i0 = np.searchsorted(bp0, x, side="right") - 1
        i1 = np.searchsorted(bp1, x, side="right") - 1
        if 0 <= i0 < len(bp0) - 1 and 0 <= i1 < len(bp1) - 1:
            l0 = bp0[i0 + 1] - bp0[i0]
            l1 = bp1[i1 + 1] - bp1[i1]
            assert l0 / l1 <= band * (1 + 1e-9) and l1 / l0 <= band * (1 + 1e-9)


def test_window_too_small(pw_theta):
    with pytest.raises(WindowTooSmallError):
        build_covering(pw_theta, EPS, 1e6, (-1, 1))


def test_dropped_edges_flagged(pw_theta, pw_covering):
    lo, hi = pw_covering.window
    s0, s1 = pw_covering.covered_span
    if s0 > lo:
        assert pw_covering.dropped_left == (lo, s0)
    if s1 < hi:
        assert pw_covering.dropped_right == (s1, hi)


def test_serialization_round_trip(pw_covering, tmp_path):
    from modelspace.covering import Covering

    d = pw_covering.to_dict()
    cov2 = Covering.from_dict(d)
    assert cov2.breakpoints == pw_covering.breakpoints
    path = tmp_path / "cov.csv"
    pw_covering.to_csv(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape[0] == len(pw_covering.intervals())


# -- amplification / subdivision helpers -------------------------------------


def test_amplify_oracles():
    assert amplify((0, 1), 3) == (-1.0, 2.0)
    assert amplify((0, 1), 1) == (0.0, 1.0)
    assert amplify((2, 4), 2) == (1.0, 5.0)
    with pytest.raises(DomainError):
        amplify((0, 1), 0.5)


def test_subdivide_oracles():
    pieces = subdivide((0, 1), 4)
    assert pieces == [(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)]
    assert subdivide((0, 1), 1) == [(0.0, 1.0)]
    pieces = subdivide((-1, 2), 3)
    assert all(b - a == pytest.approx(1.0) for a, b in pieces)
    assert pieces[0][0] == -1.0 and pieces[-1][1] == 2.0


def test_min_subdivision_count_oracles():
    assert min_subdivision_count(1.0, 1.0, 0.5, 2.0) == 227
    # eps -> 1 branch: first term dominates
    assert min_subdivision_count(1.0, 100.0, 0.999, 2.0) == int(np.ceil(2 * np.sqrt(2) * 100))
    # p -> infinity branch: 8^(1/p) -> 1 from above, so N sits just over 80
    assert min_subdivision_count(1.0, 1.0, 0.5, 1e9) == 81
    assert min_subdivision_count(1.0, 1.0, 0.5, 1e9) <= min_subdivision_count(1.0, 1.0, 0.5, 2.0)


# -- reference set ------------------------------------------------------------


def test_reference_set_full_window(pw_theta, pw_covering):
    span = pw_covering.covered_span
    g = MeasurableSet.interval(*span)
    ref, plan = build_reference_set(pw_covering, g, 1, 4, 0.9)
    assert ref.measure > 0
    for n, sig in plan.sigma.items():
        assert sig == 0  # the first piece already qualifies for full-measure G
        assert plan.A_zero[n] == plan.A_sigma[n]


def test_reference_set_guarantees(unit_covering):
    th, cov = unit_covering
    g = periodic_set(0.5, 1.0, cov.covered_span)
    gamma_star = 0.2
    ref, plan = build_reference_set(cov, g, 2, 3, gamma_star)
    ivs = cov.intervals()
    amp_len = {n: 2 * (ivs[n][1] - ivs[n][0]) for n in plan.sigma}
    for n in plan.sigma:
        sel_len = amp_len[n] / (plan.a * plan.n_pieces)
        got = plan.selected_measure(n)
        assert got >= 0.5 * gamma_star * sel_len * (1 - 1e-9)
    # every returned tile holds gamma/2 of its own length
    for n, tiles in plan.tiles.items():
        for lo, hi in tiles:
            assert intersect_measure(g, (lo, hi)) >= 0.5 * gamma_star * (hi - lo) * (1 - 1e-9)
    # F is inside the union of amplified intervals
    for lo, hi in ref.components:
        inside = any(
            amplify(ivs[n], 2)[0] - 1e-12 <= lo and hi <= amplify(ivs[n], 2)[1] + 1e-12
            for n in plan.sigma)
        assert inside


def test_reference_set_density_error(pw_theta, pw_covering):
    g = MeasurableSet.interval(-0.05, 0.05)  # nearly empty
    with pytest.raises(DensityError) as exc:
        build_reference_set(pw_covering, g, 1, 4, 0.9)
    assert exc.value.index is not None


def test_reference_set_gamma_close_to_one(pw_theta, pw_covering):
    span = pw_covering.covered_span
    g = MeasurableSet.interval(*span)
    ref, plan = build_reference_set(pw_covering, g, 1, 4, 0.999)
    for n in plan.sigma:
        assert plan.A_zero[n] == plan.A_sigma[n]  # pigeonhole at eta = gamma/2
