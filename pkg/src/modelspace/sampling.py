"""Empirical sampling constants, kernel density probes, and the
theoretical bound shapes they are compared against.

The empirical constant of a set G is the largest ratio

    (integral over R of |f|^p) / (integral over G of |f|^p)

seen over a finite family of kernel combinations; by construction it is a
lower bound for the true sampling constant.  Both integrals carry the
same full-line tail term (for p = 2 the exact tail from the
reproducing-kernel Gram matrix, otherwise a sampled power law), so the
window-vs-set comparison is unbiased and the whole-window set gives
exactly 1.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh
from scipy.optimize import minimize

from .errors import DomainError
from .inner import InnerFunction
from .quadrature import adaptive_panel_edges, integrate, panel_points
from .sets import MeasurableSet
from .spaces import QuadratureSpec, TestFunction, kernel_eval

_CP_CACHE: dict = {}


def c_p_constant(p: float) -> float:
    """Quadrature value of the integral over R of dt/(1+|t|^p)."""
    p = float(p)
    if p <= 1:
        raise DomainError("the integral diverges for p <= 1")
    if p not in _CP_CACHE:
        big = 1e4
        body, _ = integrate(lambda t: 1.0 / (1.0 + t ** p), 0.0, big, rtol=1e-12)
        tail = big ** (1.0 - p) / (p - 1.0)
        _CP_CACHE[p] = 2.0 * (float(body) + tail)
    return _CP_CACHE[p]


@dataclass(frozen=True)
class BoundReport:
    """Theoretical bound shapes for a parameter point, with fitted constants."""

    gamma: float
    a: int
    p: float
    epsilon: float
    c_fit: float
    exp_bound: float          # exp(C a^2/gamma ln(1/gamma))
    power_bound: float        # (1/gamma)^C, the a = 1 regime
    dyakonov: float | None    # 2^(1/(p delta_y)) / m_y
    c_p: float
    c1: float                 # ((1+eps)/(2 pi c_p))^p
    power_bound_applies: bool
    dyakonov_comparison: bool
    c_emp: float | None = None

    def to_dict(self):
        return {
            "gamma": self.gamma, "a": self.a, "p": self.p, "epsilon": self.epsilon,
            "c_fit": self.c_fit, "exp_bound": self.exp_bound,
            "power_bound": self.power_bound, "dyakonov": self.dyakonov,
            "c_p": self.c_p, "c1": self.c1,
            "power_bound_applies": self.power_bound_applies,
            "dyakonov_comparison": self.dyakonov_comparison,
            "c_emp": self.c_emp,
        }


def theoretical_bounds(gamma: float, a: int, p: float, epsilon: float,
                       c_fit: float = 1.0, delta_y: float | None = None,
                       m_y: float | None = None, c_emp: float | None = None) -> BoundReport:
    """Evaluate the three bound shapes at one parameter point."""
    if not 0.0 < gamma < 1.0:
        raise DomainError("gamma must lie in (0, 1)")
    if a < 1:
        raise DomainError("a must be >= 1")
    cp = c_p_constant(p)
    dyak = None
    if delta_y is not None and m_y is not None:
        dyak = float(2.0 ** (1.0 / (p * delta_y)) / m_y)
    return BoundReport(
        gamma=float(gamma), a=int(a), p=float(p), epsilon=float(epsilon),
        c_fit=float(c_fit),
        exp_bound=float(np.exp(c_fit * a * a / gamma * np.log(1.0 / gamma))),
        power_bound=float((1.0 / gamma) ** c_fit),
        dyakonov=dyak, c_p=cp, c1=float(((1.0 + epsilon) / (2.0 * np.pi * cp)) ** p),
        power_bound_applies=(a == 1), dyakonov_comparison=(dyak is not None),
        c_emp=c_emp,
    )


# ---------------------------------------------------------------------------
# family generation and ratio evaluation


@dataclass(frozen=True)
class FamilySpec:
    """Reproducible randomized family of kernel node sets."""

    n_sets: int = 32
    max_nodes: int = 8
    seed: int = 1234
    im_range: tuple | None = None   # default (0.05, 5) * window_scale/10
    re_fraction: float = 0.8
    restarts: int = 16              # multistart count for p != 2


def kernel_node_family(window, fam: FamilySpec):
    rng = np.random.default_rng(fam.seed)
    lo, hi = float(window[0]), float(window[1])
    scale = max(abs(lo), abs(hi))
    im_lo, im_hi = fam.im_range or (0.05 * scale / 10.0, 5.0 * scale / 10.0)
    sets = []
    for _ in range(fam.n_sets):
        m = int(rng.integers(1, fam.max_nodes + 1))
        re = rng.uniform(fam.re_fraction * lo, fam.re_fraction * hi, m)
        im = np.exp(rng.uniform(np.log(im_lo), np.log(im_hi), m))
        sets.append(tuple(re + 1j * im))
    return sets


class _NodeSetBanks:
    """Frozen quadrature layout and kernel values for one node set.

    The window layout is adapted to the node set once (pilot: sum of
    squared kernel moduli) and shared by the full-window and restricted
    integrals, so nested sets keep their ratios monotone.
    """

    def __init__(self, theta: InnerFunction, nodes, gamma_set: MeasurableSet,
                 spec: QuadratureSpec):
        self.theta = theta
        self.nodes = tuple(complex(v) for v in nodes)
        for lam in self.nodes:
            if not lam.imag > 0:
                raise DomainError(f"kernel node {lam} not in the upper half-plane")
        self.spec = spec
        m = len(self.nodes)

        def bank(t):
            t = np.asarray(t, dtype=complex)
            th_t = theta.eval(t)
            K = np.empty((m, t.size), dtype=complex)
            for j, lam in enumerate(self.nodes):
                c_bar = np.conj(theta.eval(lam))
                K[j] = (1j / (2 * np.pi)) * (1.0 - c_bar * th_t) / (t - np.conj(lam))
            return K

        self._bank = bank

        def pilot(t):
            K = bank(t)
            return np.sum(np.abs(K) ** 2, axis=0)

        lo, hi = spec.window
        edges = adaptive_panel_edges(pilot, lo, hi, rtol=1e-9, max_panels=1024)
        self.pts_win, self.w_win = panel_points(edges)
        self.K_win = bank(self.pts_win)

        pts_g, w_g = [], []
        for a, b in gamma_set.clip(lo, hi).components:
            e = adaptive_panel_edges(pilot, a, b, rtol=1e-9, max_panels=256,
                                     initial_panels=4)
            p_, w_ = panel_points(e)
            pts_g.append(p_)
            w_g.append(w_)
        self.pts_g = np.concatenate(pts_g) if pts_g else np.zeros(0)
        self.w_g = np.concatenate(w_g) if w_g else np.zeros(0)
        self.K_g = bank(self.pts_g) if self.pts_g.size else np.zeros((m, 0), complex)

        # exact full-line Gram via the reproducing property
        lam_arr = np.asarray(self.nodes)
        A = np.empty((m, m), dtype=complex)
        for j, lam in enumerate(self.nodes):
            A[:, j] = np.atleast_1d(kernel_eval(theta, lam, lam_arr))
        self.A = 0.5 * (A + A.conj().T)

        # tail sample points for the p != 2 power-law model
        R = spec.radius
        ts = np.linspace(0.9 * R, R, spec.tail_samples)
        self.ts_tail = np.concatenate([ts, -ts])
        self.K_tail = bank(self.ts_tail)

    def grams(self):
        """(A, G_win, G_gamma) with G_D[i,j] = integral over D of conj(k_i) k_j."""
        Kc = np.conj(self.K_win)
        G_win = (Kc * self.w_win) @ self.K_win.T
        G_win = 0.5 * (G_win + G_win.conj().T)
        if self.K_g.size:
            Kcg = np.conj(self.K_g)
            G_g = (Kcg * self.w_g) @ self.K_g.T
            G_g = 0.5 * (G_g + G_g.conj().T)
        else:
            G_g = np.zeros_like(G_win)
        return self.A, G_win, G_g

    def ratio_p(self, a: np.ndarray, p: float):
        """(I_R + T)/(I_G + T) for the combination with coefficients a."""
        f_win = a @ self.K_win
        f_g = a @ self.K_g if self.K_g.size else np.zeros(0)
        i_win = float(self.w_win @ np.abs(f_win) ** p)
        i_g = float(self.w_g @ np.abs(f_g) ** p) if f_g.size else 0.0
        f_t = a @ self.K_tail
        R = self.spec.radius
        half = len(self.ts_tail) // 2
        alpha_p = float(np.mean(np.abs(self.ts_tail[:half] * f_t[:half]) ** p)) + \
            float(np.mean(np.abs(self.ts_tail[half:] * f_t[half:]) ** p))
        tail = alpha_p * R ** (1.0 - p) / (p - 1.0)
        return (i_win + tail) / max(i_g + tail, 1e-300)


def _solve_p2(banks: _NodeSetBanks):
    """Largest generalized Rayleigh quotient a*Aa / a*(G_g + A - G_win)a."""
    A, G_win, G_g = banks.grams()
    tail = A - G_win
    # clip tiny negative eigen-dust so the denominator stays PSD
    den = G_g + tail
    m = A.shape[0]
    reg = 0.0
    regularized = False
    for attempt in range(6):
        try:
            w, v = eigh(A, den + reg * np.eye(m))
            break
        except LinAlgError:
            regularized = True
            reg = max(reg * 10.0, 1e-14 * max(np.trace(den).real, 1e-300))
    else:
        raise LinAlgError("generalized eigensolve failed even with regularization")
    if regularized:
        warnings.warn("restricted Gram matrix nearly singular; solve regularized")
    k = int(np.argmax(w))
    a = v[:, k]
    j = int(np.argmax(np.abs(a)))
    a = a * (np.conj(a[j]) / abs(a[j]))  # fix the free phase for determinism
    return float(w[k]), a, regularized


def _solve_general_p(banks: _NodeSetBanks, p: float, restarts: int, seed: int):
    """Multistart local ascent of the ratio for p != 2 (lower bound only)."""
    m = len(banks.nodes)
    rng = np.random.default_rng(seed)
    _, a0, _ = _solve_p2(banks)
    starts = [a0]
    for _ in range(max(0, restarts - 1)):
        starts.append(rng.standard_normal(m) + 1j * rng.standard_normal(m))

    def objective(x):
        a = x[:m] + 1j * x[m:]
        n = np.linalg.norm(a)
        if n == 0:
            return 0.0
        return -np.log(banks.ratio_p(a / n, p))

    best_val, best_a = -np.inf, a0
    for a_start in starts:
        x0 = np.concatenate([a_start.real, a_start.imag])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": 400 * m, "fatol": 1e-10, "xatol": 1e-8})
        val = float(np.exp(-res.fun))
        if val > best_val:
            best_val = val
            a = res.x[:m] + 1j * res.x[m:]
            best_a = a / np.linalg.norm(a)
    return best_val, best_a, False


@dataclass(frozen=True)
class SamplingEstimate:
    """Empirical lower bound for the sampling constant, with its witness."""

    value: float
    witness: TestFunction
    per_set: tuple     # ratio per node set, in family order
    regularized: bool

    def to_dict(self):
        return {"value": self.value, "witness": self.witness.to_dict(),
                "per_set": list(self.per_set), "regularized": self.regularized}


def empirical_sampling_constant(theta: InnerFunction, gamma_set: MeasurableSet,
                                p: float, family=None, spec: QuadratureSpec | None = None,
                                fam_spec: FamilySpec | None = None,
                                extra_node_sets=(), jobs: int = 1) -> SamplingEstimate:
    """Max ratio of full-line to restricted p-norm over the node-set family.

    For p = 2 the optimal coefficients per node set solve a generalized
    Rayleigh problem in closed form; otherwise multistart local ascent is
    used and the result is a lower bound only (it always is one).
    """
    if spec is None:
        spec = QuadratureSpec()
    if gamma_set.clip(*spec.window).measure <= 0:
        raise DomainError("gamma_set has no mass inside the quadrature window")
    if family is None:
        fam_spec = fam_spec or FamilySpec()
        family = kernel_node_family(spec.window, fam_spec)
    family = list(family) + [tuple(ns) for ns in extra_node_sets]
    fam_restarts = (fam_spec or FamilySpec()).restarts

    def solve_one(nodes):
        banks = _NodeSetBanks(theta, nodes, gamma_set, spec)
        if p == 2:
            val, a, reg = _solve_p2(banks)
        else:
            val, a, reg = _solve_general_p(banks, p, fam_restarts,
                                           seed=(fam_spec or FamilySpec()).seed)
        return val, a, reg

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(solve_one, family))
    else:
        results = [solve_one(ns) for ns in family]

    values = [r[0] for r in results]
    k = int(np.argmax(values))
    witness = TestFunction(theta, family[k], tuple(results[k][1]))
    return SamplingEstimate(value=float(values[k]), witness=witness,
                            per_set=tuple(float(v) for v in values),
                            regularized=any(r[2] for r in results))


def density_probe(theta: InnerFunction, gamma_set: MeasurableSet, p: float,
                  probes, spec: QuadratureSpec | None = None):
    """min over probe nodes of the restricted-to-full norm ratio of the
    normalized kernel; its reciprocal is a lower bound for the sampling
    constant.  Returns (min_value, argmin_node, per-probe values)."""
    if spec is None:
        spec = QuadratureSpec()
    vals = []
    for lam in probes:
        banks = _NodeSetBanks(theta, (lam,), gamma_set, spec)
        a = np.array([1.0 + 0j])
        if p == 2:
            A, G_win, G_g = banks.grams()
            tail = float((A - G_win)[0, 0].real)
            num = float(G_g[0, 0].real) + tail
            den = float(A[0, 0].real)
            vals.append(num / den)
        else:
            vals.append(1.0 / banks.ratio_p(a, p))
    k = int(np.argmin(vals))
    return float(vals[k]), complex(probes[k]), [float(v) for v in vals]


# ---------------------------------------------------------------------------
# sweeps and growth-shape fits


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    a: int
    c_emp: float
    exp_bound: float
    power_bound: float

    def to_dict(self):
        return {"gamma": self.gamma, "a": self.a, "c_emp": self.c_emp,
                "exp_bound": self.exp_bound, "power_bound": self.power_bound}


def fit_growth(gammas, c_emps):
    """Compare log C vs log(1/gamma) (polynomial) against log C vs 1/gamma
    (exponential); returns slopes, R^2 of the log-log fit, and both SSRs."""
    g = np.asarray(gammas, dtype=float)
    y = np.log(np.asarray(c_emps, dtype=float))
    x_poly = np.log(1.0 / g)
    x_exp = 1.0 / g

    def lsq(x):
        A = np.column_stack([x, np.ones_like(x)])
        coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
        pred = A @ coef
        ssr = float(np.sum((y - pred) ** 2))
        sst = float(np.sum((y - np.mean(y)) ** 2))
        r2 = 1.0 - ssr / sst if sst > 0 else 1.0
        return coef[0], ssr, r2

    slope_poly, ssr_poly, r2_poly = lsq(x_poly)
    slope_exp, ssr_exp, r2_exp = lsq(x_exp)
    return {
        "poly_slope": float(slope_poly), "poly_ssr": ssr_poly, "poly_r2": r2_poly,
        "exp_slope": float(slope_exp), "exp_ssr": ssr_exp, "exp_r2": r2_exp,
    }
