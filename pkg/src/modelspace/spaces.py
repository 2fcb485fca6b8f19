"""Reproducing kernels, test functions, norms, and the inequality engines
(Bernstein, Remez, domination) for the space attached to an inner function.

The kernel at lambda in the upper half-plane is

    k_lambda(z) = (i / 2 pi) (1 - conj(Theta(lambda)) Theta(z)) / (z - conj(lambda)),

and every test function is a finite combination sum a_j k_{lambda_j},
hence an element of the space by construction.  Norm integrals are
truncated to a window; the mass beyond it is estimated from the |t|^{-1}
kernel decay and added symmetrically wherever two integrals of the same
integrand are compared, so the truncation bias largely cancels.
"""

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .errors import ContinuationError, DomainError
from .geometry import SublevelDistance
from .inner import InnerFunction
from .quadrature import integrate, integrate_on_set
from .sets import MeasurableSet

TWO_PI = 2.0 * np.pi


def kernel_eval(theta: InnerFunction, lam: complex, z):
    """k_lambda(z) for Im lambda > 0 and z in the closed upper half-plane
    (the formula itself is fine anywhere off the poles)."""
    lam = complex(lam)
    if not lam.imag > 0:
        raise DomainError(f"kernel node must satisfy Im lambda > 0, got {lam}")
    z = np.asarray(z, dtype=complex)
    c_bar = np.conj(theta.eval(lam))
    out = (1j / TWO_PI) * (1.0 - c_bar * theta.eval(z)) / (z - np.conj(lam))
    return out[()] if out.ndim == 0 else out


def kernel_norm_sq(theta: InnerFunction, lam: complex) -> float:
    """||k_lambda||_2^2 = k_lambda(lambda) = (1 - |Theta(lambda)|^2)/(4 pi Im lambda)."""
    lam = complex(lam)
    return float((1.0 - np.exp(2.0 * theta.log_modulus(lam))) / (4.0 * np.pi * lam.imag))


def abs_power_integral(p: float, y: float) -> float:
    """Closed form of the integral over R of dt/|t - (x+iy)|^p: y^(1-p) sqrt(pi)
    Gamma((p-1)/2)/Gamma(p/2)."""
    from scipy.special import gamma as _gamma

    if p <= 1:
        raise DomainError("integral diverges for p <= 1")
    return float(y ** (1.0 - p) * np.sqrt(np.pi) * _gamma((p - 1) / 2.0) / _gamma(p / 2.0))


@dataclass(frozen=True)
class QuadratureSpec:
    """Window, tolerance and tail handling for integrals over the line."""

    window: tuple = (-200.0, 200.0)
    rtol: float = 1e-10
    limit: int = 6000
    tail: bool = True
    tail_samples: int = 64

    @property
    def radius(self) -> float:
        return max(abs(self.window[0]), abs(self.window[1]))


@dataclass(frozen=True)
class TestFunction:
    """Finite kernel combination sum_j a_j k_{lambda_j}."""

    __test__ = False  # not a pytest class, despite the name

    theta: InnerFunction
    nodes: tuple
    coeffs: tuple

    def __post_init__(self):
        nodes = tuple(complex(v) for v in self.nodes)
        coeffs = tuple(complex(v) for v in self.coeffs)
        if len(nodes) != len(coeffs) or not nodes:
            raise DomainError("nodes and coeffs must be nonempty and equal length")
        for lam in nodes:
            if not lam.imag > 0:
                raise DomainError(f"node {lam} not in the upper half-plane")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        th_t = self.theta.eval(t)
        out = np.zeros(t.shape, dtype=complex)
        for lam, a in zip(self.nodes, self.coeffs):
            c_bar = np.conj(self.theta.eval(complex(lam)))
            out = out + a * (1j / TWO_PI) * (1.0 - c_bar * th_t) / (t - np.conj(lam))
        return out[()] if out.ndim == 0 else out

    def derivative(self, n: int, t):
        """Analytic n-th derivative (product rule on the kernel formula)."""
        if n < 0:
            raise DomainError("derivative order must be nonnegative")
        t = np.asarray(t, dtype=complex)
        if n == 0:
            return self(t)
        ders = self.theta.derivatives(t, n)
        out = np.zeros(t.shape, dtype=complex)
        for lam, a in zip(self.nodes, self.coeffs):
            pole = np.conj(complex(lam))
            c_bar = np.conj(self.theta.eval(complex(lam)))
            g = [(-1) ** j * factorial(j) / (t - pole) ** (j + 1) for j in range(n + 1)]
            series = g[n] - c_bar * sum(comb(n, j) * ders[j] * g[n - j] for j in range(n + 1))
            out = out + a * (1j / TWO_PI) * series
        return out[()] if out.ndim == 0 else out

    def scaled(self, c: complex) -> "TestFunction":
        return TestFunction(self.theta, self.nodes, tuple(c * a for a in self.coeffs))

    def to_dict(self) -> dict:
        return {
            "nodes": [[lam.real, lam.imag] for lam in self.nodes],
            "coefficients": [[a.real, a.imag] for a in self.coeffs],
        }


def _boundary_kernel_conj_pow(theta: InnerFunction, x: float, t: np.ndarray, power: int):
    """conj(k_x(t))^power for real x, with the removable singularity at
    t = x patched by a third-order series of Theta around x."""
    t = np.asarray(t, dtype=float)
    th_x = complex(theta.eval(complex(x)))
    c_bar = np.conj(th_x)
    h = t - x
    scale = max(1.0, abs(x))
    near = np.abs(h) < 1e-5 * scale
    k = np.empty(t.shape, dtype=complex)
    far = ~near
    if np.any(far):
        th_t = theta.eval(t[far].astype(complex))
        k[far] = (1j / TWO_PI) * (1.0 - c_bar * th_t) / (h[far])
    if np.any(near):
        d = theta.derivatives(np.array([complex(x)]), 3)
        d1, d2, d3 = d[1][0], d[2][0], d[3][0]
        hn = h[near]
        k[near] = -(1j / TWO_PI) * c_bar * (d1 + d2 * hn / 2.0 + d3 * hn ** 2 / 6.0)
    return np.conj(k) ** power


def derivative_via_kernel(f: TestFunction, n: int, x: float, spec: QuadratureSpec):
    """f^(n)(x) = n! (2 pi i)^n * integral of f(t) conj(k_x(t))^(n+1) dt.

    The (2 pi i)^n factor belongs to the i/(2 pi) kernel normalization
    used here: expanding conj(k_x)^(n+1) and dropping the terms killed by
    orthogonality to Theta^j H^p reduces the integral to the Cauchy
    formula for the n-th derivative (checked against analytic
    derivatives).  Window-truncated; the integrand decays like
    |t|^-(n+2), so the neglected tail is small for windows large against
    the node scale."""
    if n < 0:
        raise DomainError("derivative order must be nonnegative")
    theta = f.theta

    def integrand(t):
        return f(t) * _boundary_kernel_conj_pow(theta, float(x), t, n + 1)

    val, _ = integrate(integrand, spec.window[0], spec.window[1],
                       rtol=spec.rtol, limit=spec.limit)
    return factorial(n) * (2j * np.pi) ** n * complex(val)


# ---------------------------------------------------------------------------
# norms with symmetric tail handling


def _tail_estimate(values_fn, p: float, spec: QuadratureSpec) -> float:
    """Power-law tail of integral |f|^p beyond the window: |f| ~ alpha/|t|
    with alpha^p fitted as the mean of |t f(t)|^p near each window edge."""
    if not spec.tail:
        return 0.0
    if p <= 1:
        raise DomainError("tail extrapolation requires p > 1")
    R = spec.radius
    out = 0.0
    for sgn in (1.0, -1.0):
        ts = sgn * np.linspace(0.9 * R, R, spec.tail_samples)
        alpha_p = float(np.mean(np.abs(ts * values_fn(ts)) ** p))
        out += alpha_p * R ** (1.0 - p) / (p - 1.0)
    return out


def lp_norm_p(f, p: float, spec: QuadratureSpec, domain: MeasurableSet | None = None):
    """Integral of |f|^p over the domain; domain None means the full line
    (window plus extrapolated tail).  Returns (window_part, tail_part)."""
    if p <= 1:
        raise DomainError("p must lie in (1, infinity)")

    def integrand(t):
        return np.abs(f(t)) ** p

    if domain is None:
        val, _ = integrate(integrand, spec.window[0], spec.window[1],
                           rtol=spec.rtol, limit=spec.limit)
        return float(val), _tail_estimate(f, p, spec)
    val, _ = integrate_on_set(integrand, domain, rtol=spec.rtol, limit=spec.limit)
    return float(val), 0.0


def lp_norm(f, p: float, spec: QuadratureSpec, domain: MeasurableSet | None = None) -> float:
    w, t = lp_norm_p(f, p, spec, domain)
    return float((w + t) ** (1.0 / p))


def inner_product_kernel(f: TestFunction, lam: complex, spec: QuadratureSpec) -> complex:
    """<f, k_lambda> = integral f(t) conj(k_lambda(t)) dt over the window,
    plus the closed-form tail of the non-oscillating part of the integrand.

    On the line the product expands into a constant-coefficient rational
    part plus terms carrying Theta(t); the latter either oscillate (tau>0)
    or settle to the Blaschke boundary limit (tau=0), and their residual
    tails are O(1/R^2).  The rational parts are integrated exactly."""
    theta = f.theta
    lam = complex(lam)
    c_lam = complex(theta.eval(lam))
    k = lambda t: kernel_eval(theta, lam, t)

    def integrand(t):
        return f(t) * np.conj(k(t))

    val, _ = integrate(integrand, spec.window[0], spec.window[1],
                       rtol=spec.rtol, limit=spec.limit)
    if not spec.tail:
        return complex(val)

    R = spec.radius

    if theta.tau == 0:
        # no oscillation: substituting u = 1/t turns each tail into a smooth
        # integral on (0, 1/R] that the panel rule handles to full accuracy
        def right(u):
            t = 1.0 / u
            return integrand(t) / u ** 2

        def left(u):
            t = -1.0 / u
            return integrand(t) / u ** 2

        t_r, _ = integrate(right, 0.0, 1.0 / R, rtol=spec.rtol, limit=spec.limit)
        t_l, _ = integrate(left, 0.0, 1.0 / R, rtol=spec.rtol, limit=spec.limit)
        return complex(val + t_r + t_l)

    def rational_tail(A, B):
        # integral over |t| > R of dt/((t-A)(t-B)), principal-branch logs
        plus = np.log((R - B) / (R - A)) / (A - B)
        minus = np.log((R + B) / (R + A)) / (B - A)
        return plus + minus

    tail = 0.0 + 0.0j
    for lj, aj in zip(f.nodes, f.coeffs):
        cj = complex(theta.eval(complex(lj)))
        kappa = 1.0 + np.conj(cj) * c_lam
        tail += aj * kappa / (TWO_PI * TWO_PI) * rational_tail(np.conj(complex(lj)), lam)

    # first integration-by-parts boundary term of the oscillating part
    # (frequencies +-tau); the remainder is O(1/(tau^2 R^3))
    th_p = complex(theta.eval(R))
    th_m = complex(theta.eval(-R))

    def s_sum(t, weight_conj_c):
        out = 0.0 + 0.0j
        for lj, aj in zip(f.nodes, f.coeffs):
            w = np.conj(complex(theta.eval(complex(lj)))) if weight_conj_c else 1.0
            out += aj * w / ((t - np.conj(complex(lj))) * (t - lam))
        return out

    osc = (th_p * s_sum(R, True) - th_m * s_sum(-R, True)
           - c_lam * np.conj(th_p) * s_sum(R, False)
           + c_lam * np.conj(th_m) * s_sum(-R, False))
    tail += osc / (1j * theta.tau * TWO_PI * TWO_PI)
    return complex(val + tail)


# ---------------------------------------------------------------------------
# Bernstein ratio


def bernstein_ratio(f: TestFunction, n: int, p: float, epsilon: float, window,
                    spec: QuadratureSpec | None = None,
                    dist: SublevelDistance | None = None) -> float:
    """|| f^(n) d_eps^n ||_p / (n! (4/eps)^n ||f||_p) over the window.

    The uniform-in-f bound on this ratio is the content of the Bernstein
    inequality for the space; tails are added to numerator and
    denominator symmetrically.
    """
    if n < 1:
        raise DomainError("Bernstein ratio needs n >= 1")
    if spec is None:
        spec = QuadratureSpec(window=(float(window[0]), float(window[1])))
    if dist is None:
        dist = SublevelDistance(f.theta, epsilon, window=window)

    def weighted(t):
        t = np.asarray(t, dtype=float)
        return f.derivative(n, t) * dist(t) ** n

    num_w, _ = integrate(lambda t: np.abs(weighted(t)) ** p,
                         spec.window[0], spec.window[1], rtol=spec.rtol, limit=spec.limit)
    num_tail = _tail_estimate(weighted, p, spec)
    den_w, den_tail = lp_norm_p(f, p, spec)
    num = (float(num_w) + num_tail) ** (1.0 / p)
    den = (float(den_w) + den_tail) ** (1.0 / p)
    return float(num / (factorial(n) * (4.0 / epsilon) ** n * den))


# ---------------------------------------------------------------------------
# Remez check


@dataclass(frozen=True)
class RemezReport:
    lhs: float
    rhs: float
    m_big: float      # max over the surrounding region D_J
    m_small: float    # max over J
    exponent: float
    holds: bool

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "M": self.m_big, "m": self.m_small,
                "exponent": self.exponent, "holds": self.holds}


def _max_on_region(f, J, factor: float = 4.0, grid=(161, 81), rounds: int = 3):
    """max |f| over {dist(z, J) < factor |J|} by grid plus local refinement."""
    lo, hi = J
    L = hi - lo
    xs = np.linspace(lo - factor * L, hi + factor * L, grid[0])
    ys = np.linspace(-factor * L, factor * L, grid[1])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    dx = np.maximum(np.maximum(lo - X, X - hi), 0.0)
    mask = np.hypot(dx, Y) <= factor * L
    pts = (X + 1j * Y)[mask]
    vals = np.abs(f(pts))
    k = int(np.argmax(vals))
    best, zb = float(vals[k]), complex(pts[k])
    h = max((xs[1] - xs[0]), (ys[1] - ys[0]))
    for _ in range(rounds):
        gx = np.linspace(zb.real - h, zb.real + h, 33)
        gy = np.linspace(zb.imag - h, zb.imag + h, 33)
        GX, GY = np.meshgrid(gx, gy, indexing="ij")
        dx = np.maximum(np.maximum(lo - GX, GX - hi), 0.0)
        mask = np.hypot(dx, GY) <= factor * L
        if not np.any(mask):
            break
        sub = (GX + 1j * GY)[mask]
        sv = np.abs(f(sub))
        j = int(np.argmax(sv))
        if sv[j] > best:
            best, zb = float(sv[j]), complex(sub[j])
        h = 2.0 * h / 32
    return best


def _max_on_interval(f, J, n: int = 4097, rounds: int = 3):
    lo, hi = J
    xs = np.linspace(lo, hi, n)
    vals = np.abs(f(xs.astype(complex)))
    k = int(np.argmax(vals))
    best, xb = float(vals[k]), float(xs[k])
    h = xs[1] - xs[0]
    for _ in range(rounds):
        gx = np.clip(np.linspace(xb - h, xb + h, 65), lo, hi)
        gv = np.abs(f(gx.astype(complex)))
        j = int(np.argmax(gv))
        if gv[j] > best:
            best, xb = float(gv[j]), float(gx[j])
        h = 2.0 * h / 64
    return best


def remez_check(f: TestFunction, J, E: MeasurableSet, p: float,
                spec: QuadratureSpec | None = None) -> RemezReport:
    """Check the Remez-type bound

        int_J |f|^p <= (300 |J| / |E|)^(p ln(M/m)/ln 2 + 1) int_E |f|^p

    with M = max |f| over {dist(z,J) < 4|J|} and m = max |f| over J.
    The analytic continuation must be pole-free on that region; poles are
    the conjugated zeros of Theta and the conjugated kernel nodes."""
    lo, hi = float(J[0]), float(J[1])
    if not hi > lo:
        raise DomainError("J must have positive length")
    L = hi - lo
    clipped = E.clip(lo, hi)
    if clipped.measure < E.measure * (1 - 1e-12):
        raise DomainError("E must be contained in J")
    E = clipped
    if E.measure <= 0:
        raise DomainError("E must have positive measure inside J")
    if spec is None:
        spec = QuadratureSpec(window=(lo, hi), tail=False)

    poles = list(f.theta.poles) + [np.conj(complex(lam)) for lam in f.nodes]
    for q in poles:
        dx = max(lo - q.real, q.real - hi, 0.0)
        if np.hypot(dx, q.imag) <= 4.0 * L:
            raise ContinuationError(
                f"pole {q} of the analytic continuation lies inside the Remez region")

    m_small = _max_on_interval(f, (lo, hi))
    m_big = max(_max_on_region(f, (lo, hi)), m_small)
    lhs, _ = integrate(lambda t: np.abs(f(t)) ** p, lo, hi, rtol=spec.rtol, limit=spec.limit)
    e_int, _ = integrate_on_set(lambda t: np.abs(f(t)) ** p, E, rtol=spec.rtol, limit=spec.limit)
    exponent = p * np.log(m_big / m_small) / np.log(2.0) + 1.0
    rhs = float((300.0 * L / E.measure) ** exponent * e_int)
    return RemezReport(lhs=float(lhs), rhs=rhs, m_big=m_big, m_small=m_small,
                       exponent=float(exponent), holds=bool(lhs <= rhs * (1 + 1e-6)))
