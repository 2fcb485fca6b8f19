"""Command-line entry point: scenario orchestration and report emission.

Subcommands: covering | density | volberg | sample-constant | verify |
report.  Each consumes one JSON scenario config and writes JSON/CSV
artifacts (and matplotlib figures on the report paths) into the output
directory.  Exit codes: 0 success, 1 property violation, 2
configuration/domain error.

Identical config and seed produce byte-identical JSON/CSV artifacts;
every reported number carries the tolerance it was computed under.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import covering as covering_mod
from .config import ScenarioConfig
from .errors import ToolkitError
from .geometry import SublevelDistance, comparability_report
from .harmonic import (EdgeMeasure, UpperHalfPlaneGrid, harmonic_measure,
                       harmonic_measure_floor, reverse_condition_inf, volberg_inf)
from .sampling import (FamilySpec, empirical_sampling_constant, fit_growth,
                       kernel_node_family, theoretical_bounds)
from .sets import MeasurableSet, periodic_set
from .spaces import (QuadratureSpec, TestFunction, bernstein_ratio, inner_product_kernel,
                     kernel_eval, kernel_norm_sq, remez_check)

DEFINING_INTEGRAL_RTOL = 1e-6
REPRODUCING_RTOL = 1e-6


def qty(value, tol):
    """A reported number with the tolerance it was computed under."""
    return {"value": value, "tol": tol}


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _covering_for(cfg, dist=None):
    return covering_mod.build_covering(
        cfg.theta, cfg.epsilon, cfg.c, cfg.window, anchor=cfg.anchor, dist=dist)


# ---------------------------------------------------------------------------
# subcommands


def cmd_covering(cfg: ScenarioConfig, out: Path, jobs: int) -> int:
    dist = SublevelDistance(cfg.theta, cfg.epsilon, window=cfg.window)
    cov = _covering_for(cfg, dist=dist)
    payload = cov.to_dict()
    payload["schema"] = 1
    payload["tolerances"] = {
        "defining_integral_rel": DEFINING_INTEGRAL_RTOL,
        "breakpoint_solve_rel": covering_mod._SOLVE_RTOL,
    }
    _write_json(out / "covering.json", payload)
    cov.to_csv(out / "covering.csv")
    from .plots import covering_figure

    covering_figure(cov, dist.boundary_points, out / "levelset.svg")
    print(f"covering: {len(cov.intervals())} intervals, alpha_hat={cov.alpha_hat:.4g}")
    return 0


def cmd_density(cfg: ScenarioConfig, out: Path, jobs: int) -> int:
    from .sets import is_dense, max_gamma

    if cfg.gamma_set is None:
        raise ToolkitError("density command requires a gamma_set in the config")
    cov = _covering_for(cfg)
    gstar, worst = max_gamma(cfg.gamma_set, cov, cfg.a)
    payload = {
        "schema": 1,
        "gamma_star": qty(gstar, 0.0),
        "worst_index": worst,
        "a": cfg.a,
    }
    if cfg.gamma is not None:
        rep = is_dense(cfg.gamma_set, cov, cfg.gamma, cfg.a)
        payload["dense"] = rep.dense
        payload["gamma"] = cfg.gamma
        payload["violations"] = [[n, qty(r, 0.0)] for n, r in rep.violations]
    _write_json(out / "density.json", payload)
    print(f"density: gamma_star={gstar:.6g} at interval {worst}")
    return 0


def cmd_volberg(cfg: ScenarioConfig, out: Path, jobs: int) -> int:
    if cfg.gamma_set is None:
        raise ToolkitError("volberg command requires a gamma_set in the config")
    grid = UpperHalfPlaneGrid.for_window(cfg.window, *cfg.grid)
    value, argmin = volberg_inf(cfg.theta, cfg.gamma_set, grid)
    v2, _ = volberg_inf(cfg.theta, cfg.gamma_set, grid.doubled())
    sensitivity = abs(value - v2) / max(value, 1e-300)

    delta = None
    n_pieces = None
    if cfg.gamma is not None:
        cov = _covering_for(cfg)
        n_pieces = covering_mod.min_subdivision_count(
            cov.alpha_hat, cfg.n0, cfg.epsilon, cfg.p)
        delta = harmonic_measure_floor(cfg.gamma / 2.0, n_pieces, cfg.a)

    payload = {
        "schema": 1,
        "volberg_inf": qty(value, sensitivity),
        "argmin": [argmin.real, argmin.imag],
        "grid_doubling_relative_change": sensitivity,
        "delta_bound": qty(delta, 0.0) if delta is not None else None,
        "n_pieces": n_pieces,
        "note": "upper bound for the true infimum (grid plus one local refinement)",
    }
    _write_json(out / "volberg.json", payload)

    xs = np.linspace(grid.x_range[0], grid.x_range[1], grid.nx)
    ys = np.geomspace(grid.y_range[0], grid.y_range[1], grid.ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = (X + 1j * Y)
    V = np.exp(cfg.theta.log_modulus(Z)) + harmonic_measure(Z, cfg.gamma_set)
    rows = np.column_stack([X.ravel(), Y.ravel(), V.ravel()])
    np.savetxt(out / "volberg_heatmap.csv", rows, delimiter=",", fmt="%.17g",
               header="x,y,value", comments="")
    from .plots import volberg_heatmap_figure

    volberg_heatmap_figure(xs, ys, V, argmin, out / "volberg_heatmap.png")
    print(f"volberg: inf<={value:.6g} at {argmin:.6g} (doubling change {sensitivity:.2%})")
    return 0


def _sweep_family(cfg: ScenarioConfig):
    fam = FamilySpec(
        n_sets=int(cfg.family.get("n_sets", 32)),
        max_nodes=int(cfg.family.get("max_nodes", 8)),
        seed=int(cfg.family.get("seed", cfg.seed)),
        restarts=int(cfg.family.get("restarts", 16)),
    )
    return fam


def cmd_sample_constant(cfg: ScenarioConfig, out: Path, jobs: int) -> int:
    gammas = [float(g) for g in cfg.sweep.get("gammas", (0.5, 0.25, 0.125, 0.0625))]
    period = float(cfg.sweep.get("period", 1.0))
    fam = _sweep_family(cfg)
    family = kernel_node_family(cfg.quad.window, fam)
    rows = []
    witness = None
    for g in gammas:
        gset = periodic_set(g, period, cfg.quad.window)
        est = empirical_sampling_constant(cfg.theta, gset, cfg.p, family=family,
                                          spec=cfg.quad, fam_spec=fam, jobs=jobs)
        rows.append((g, est.value))
        witness = est.witness
    fits = fit_growth([r[0] for r in rows], [r[1] for r in rows])
    c_fit = max(fits["poly_slope"], 0.0)
    table = []
    for g, c_emp in rows:
        b = theoretical_bounds(g, cfg.a, cfg.p, cfg.epsilon, c_fit=c_fit, c_emp=c_emp)
        table.append((g, cfg.a, c_emp, b.exp_bound, b.power_bound))
    np.savetxt(out / "sample_constant.csv", np.asarray(table), delimiter=",", fmt="%.17g",
               header="gamma,a,c_emp,exp_bound,power_bound", comments="")
    payload = {
        "schema": 1,
        "fit": fits,
        "c_fit": c_fit,
        "rows": [{"gamma": g, "c_emp": qty(c, cfg.quad.rtol)} for g, c in rows],
        "note": "C_emp is a lower bound for the sampling constant by construction",
    }
    _write_json(out / "sample_constant.json", payload)
    _write_json(out / "witness.json", witness.to_dict())
    from .plots import sweep_figure

    sweep_figure([r[0] for r in rows], [r[1] for r in rows], fits, out / "sweep.png")
    print(f"sample-constant: slope {fits['poly_slope']:.4g}, R2 {fits['poly_r2']:.6g}")
    return 0


def _verify_suites(cfg: ScenarioConfig, jobs: int):
    """The property suites behind `verify`; yields (name, passed, details)."""
    rng = np.random.default_rng(cfg.seed)
    theta = cfg.theta
    spec = cfg.quad

    # covering defining integral, re-verified at doubled resolution
    dist = SublevelDistance(theta, cfg.epsilon, window=cfg.window)
    cov = _covering_for(cfg, dist=dist)
    ints1 = covering_mod.defining_integrals(theta, cov, 128, dist=dist)
    ints2 = covering_mod.defining_integrals(theta, cov, 256, dist=dist)
    dev = max(np.abs(ints1 - cfg.c).max(), np.abs(ints2 - cfg.c).max())
    yield ("covering_defining_integral", bool(dev <= DEFINING_INTEGRAL_RTOL * cfg.c),
           {"max_abs_deviation": qty(float(dev), DEFINING_INTEGRAL_RTOL * cfg.c)})

    # reproducing property on random instances
    scale = 0.25 * (cfg.window[1] - cfg.window[0])
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 5))
        nodes = rng.uniform(-scale, scale, m) + 1j * np.exp(rng.uniform(np.log(0.2), np.log(3.0), m))
        coeffs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        lam = complex(rng.uniform(-scale, scale) + 1j * np.exp(rng.uniform(np.log(0.2), np.log(3.0))))
        f = TestFunction(theta, tuple(nodes), tuple(coeffs))
        ip = inner_product_kernel(f, lam, spec)
        fl = complex(f(np.array([lam], dtype=complex))[0])
        norm_f = np.sqrt(max(sum(
            (np.conj(a) * b * kernel_eval(theta, mu, nu)).real
            for a, mu in zip(coeffs, nodes) for b, nu in zip(coeffs, nodes)), 1e-300))
        norm_k = np.sqrt(kernel_norm_sq(theta, lam))
        worst = max(worst, abs(ip - fl) / (norm_f * norm_k))
    yield ("reproducing_property", bool(worst <= REPRODUCING_RTOL),
           {"worst_relative_error": qty(float(worst), REPRODUCING_RTOL)})

    # Bernstein ratios stay finite over a small family; the sharp features
    # of random kernels in a wide window do not need the full norm rtol
    bern_spec = QuadratureSpec(window=cfg.window, rtol=1e-8, limit=8000)
    ratios = []
    for _ in range(6):
        m = int(rng.integers(1, 4))
        nodes = rng.uniform(-scale, scale, m) + 1j * np.exp(rng.uniform(np.log(0.3), np.log(2.0), m))
        coeffs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        f = TestFunction(theta, tuple(nodes), tuple(coeffs))
        for n in (1, 2):
            ratios.append(bernstein_ratio(f, n, cfg.p, cfg.epsilon, cfg.window,
                                          spec=bern_spec, dist=dist))
    finite = bool(np.all(np.isfinite(ratios)))
    yield ("bernstein_ratios_finite", finite,
           {"max_ratio": qty(float(np.max(ratios)), 0.0),
            "min_ratio": qty(float(np.min(ratios)), 0.0)})

    # Remez inequality on random instances
    violations = 0
    checked = 0
    for _ in range(20):
        m = int(rng.integers(1, 3))
        im = np.exp(rng.uniform(np.log(4.0), np.log(8.0), m))
        nodes = rng.uniform(-scale, scale, m) + 1j * im
        coeffs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        f = TestFunction(theta, tuple(nodes), tuple(coeffs))
        lo = rng.uniform(-scale, scale - 1.0)
        J = (lo, lo + rng.uniform(0.3, 0.7))
        L = J[1] - J[0]
        pieces = []
        t = J[0]
        while t < J[1] and len(pieces) < 6:
            w = rng.uniform(0.05, 0.2) * L
            pieces.append((t, min(t + w, J[1])))
            t += w + rng.uniform(0.05, 0.2) * L
        E = MeasurableSet.from_intervals(pieces)
        if E.measure < 0.1 * L:
            continue
        try:
            rep = remez_check(f, J, E, cfg.p)
        except ToolkitError:
            continue
        checked += 1
        violations += 0 if rep.holds else 1
    yield ("remez_inequality", bool(violations == 0 and checked > 0),
           {"checked": checked, "violations": violations})

    # reverse Carleson positivity for the covering's edge measure
    n_pieces = covering_mod.min_subdivision_count(cov.alpha_hat, cfg.n0, cfg.epsilon, cfg.p)
    em = EdgeMeasure.from_covering(cov, n_pieces)
    inf_v, worst_iv, n_adm = reverse_condition_inf(em, theta, cfg.epsilon, cfg.n0)
    yield ("reverse_carleson_positive", bool(inf_v > 0),
           {"inf": qty(float(inf_v), 0.0), "n_admissible": n_adm,
            "n_pieces": n_pieces})


def cmd_verify(cfg: ScenarioConfig, out: Path, jobs: int) -> int:
    results = {}
    ok = True
    for name, passed, details in _verify_suites(cfg, jobs):
        results[name] = {"passed": passed, **details}
        ok = ok and passed
        print(f"verify {name}: {'PASS' if passed else 'FAIL'}")
    payload = {"schema": 1, "passed": ok, "suites": results, "seed": cfg.seed}
    _write_json(out / "verify.json", payload)
    return 0 if ok else 1


def cmd_report(cfg: ScenarioConfig, out: Path, jobs: int) -> int:
    rc = cmd_covering(cfg, out, jobs)
    if cfg.gamma_set is not None:
        rc = max(rc, cmd_density(cfg, out, jobs))
        rc = max(rc, cmd_volberg(cfg, out, jobs))
    rc = max(rc, cmd_sample_constant(cfg, out, jobs))
    # comparability profile alongside the delimited exports
    grid = np.linspace(cfg.window[0] + 1e-3, cfg.window[1] - 1e-3, 201)
    prof = comparability_report(cfg.theta, cfg.epsilon, grid, window=cfg.window)
    prof.to_csv(out / "comparability.csv")
    from .plots import comparability_figure

    comparability_figure(prof, out / "comparability.png")
    rc = max(rc, cmd_verify(cfg, out, jobs))
    return rc


COMMANDS = {
    "covering": cmd_covering,
    "density": cmd_density,
    "volberg": cmd_volberg,
    "sample-constant": cmd_sample_constant,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="modelspace",
        description="Sampling-set toolkit for model spaces of meromorphic inner functions")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="scenario JSON path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--jobs", type=int, default=1, help="data-parallel width")
    args = parser.parse_args(argv)

    try:
        cfg = ScenarioConfig.load(args.config)
        if args.seed is not None:
            raw = dict(cfg.raw)
            raw["seed"] = args.seed
            cfg = ScenarioConfig.from_dict(raw)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, max(1, args.jobs))
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
