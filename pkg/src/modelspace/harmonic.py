"""Harmonic measure on the upper half-plane, the Volberg functional, and
the edge measure on Carleson windows of subdivided covering intervals.

omega_z(G) for a finite interval union G is evaluated in closed form,

    omega_z(G) = (1/pi) * sum_j [arctan((b_j - x)/y) - arctan((a_j - x)/y)],

never by quadrature (an adaptive Poisson integral is provided separately
as the agreement oracle).  The infimum of |Theta(z)| + omega_z(G) over
the half-plane is approximated on a log-spaced grid plus one local
refinement pass; the result is an upper bound for the true infimum and
is reported as such.
"""

from dataclasses import dataclass

import numpy as np

from .covering import Covering
from .errors import DomainError, EmptyFamilyError
from .geometry import _sublevel_mask
from .inner import InnerFunction
from .quadrature import integrate_on_set
from .sets import MeasurableSet


def poisson_kernel(z: complex, t):
    """P_z(t) = y / (pi ((x-t)^2 + y^2)) for z = x + iy in the open half-plane."""
    z = complex(z)
    if not z.imag > 0:
        raise DomainError(f"Poisson kernel needs Im z > 0, got {z}")
    t = np.asarray(t, dtype=float)
    out = z.imag / (np.pi * ((z.real - t) ** 2 + z.imag ** 2))
    return out[()] if out.ndim == 0 else out


def harmonic_measure(z, gset: MeasurableSet):
    """omega_z(gset) in closed form; z may be a complex scalar or array."""
    z_in = np.asarray(z, dtype=complex)
    if np.any(z_in.imag <= 0):
        raise DomainError("harmonic measure requires Im z > 0")
    x = z_in.real
    y = z_in.imag
    out = np.zeros(z_in.shape, dtype=float)
    for a, b in gset.components:
        out = out + np.arctan((b - x) / y) - np.arctan((a - x) / y)
    out = out / np.pi
    return out[()] if out.ndim == 0 else out


def harmonic_measure_quadrature(z: complex, gset: MeasurableSet, rtol: float = 1e-12):
    """Adaptive Poisson integral of the indicator; oracle for the closed form."""
    val, _ = integrate_on_set(lambda t: poisson_kernel(z, t), gset, rtol=rtol)
    return float(val)


@dataclass(frozen=True)
class UpperHalfPlaneGrid:
    """Log-spaced-in-y evaluation grid for infima over the half-plane."""

    x_range: tuple
    y_range: tuple
    nx: int = 96
    ny: int = 64

    def __post_init__(self):
        if self.y_range[0] <= 0:
            raise DomainError("grid needs strictly positive y")

    @staticmethod
    def for_window(window, nx: int = 96, ny: int = 64) -> "UpperHalfPlaneGrid":
        lo, hi = float(window[0]), float(window[1])
        scale = max(abs(lo), abs(hi), 0.5 * (hi - lo), 1e-6)
        mid, half = 0.5 * (lo + hi), 0.75 * (hi - lo)
        return UpperHalfPlaneGrid((mid - half, mid + half), (1e-3 * scale, 10.0 * scale), nx, ny)

    def points(self) -> np.ndarray:
        xs = np.linspace(self.x_range[0], self.x_range[1], self.nx)
        ys = np.geomspace(self.y_range[0], self.y_range[1], self.ny)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return (X + 1j * Y).ravel()

    def doubled(self) -> "UpperHalfPlaneGrid":
        return UpperHalfPlaneGrid(self.x_range, self.y_range, 2 * self.nx, 2 * self.ny)


def volberg_inf(theta: InnerFunction, gset: MeasurableSet, grid: UpperHalfPlaneGrid,
                refine_rounds: int = 1):
    """min over the grid of |Theta(z)| + omega_z(gset), locally refined.

    Returns (value, argmin); an upper bound for the true infimum over the
    half-plane (the functional is continuous but non-convex, so no global
    claim is made).
    """
    pts = grid.points()
    vals = np.exp(theta.log_modulus(pts)) + harmonic_measure(pts, gset)
    k = int(np.argmin(vals))
    best, zbest = float(vals[k]), complex(pts[k])
    dx = (grid.x_range[1] - grid.x_range[0]) / max(grid.nx - 1, 1)
    for _ in range(max(0, refine_rounds)):
        # local re-grid around the argmin, spanning a couple of coarse cells
        hx = 2.0 * dx
        xs = np.linspace(zbest.real - hx, zbest.real + hx, 41)
        ys = np.geomspace(max(zbest.imag / 4.0, grid.y_range[0] / 10.0), zbest.imag * 4.0, 41)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        sub = (X + 1j * Y).ravel()
        sv = np.exp(theta.log_modulus(sub)) + harmonic_measure(sub, gset)
        j = int(np.argmin(sv))
        if sv[j] < best:
            best, zbest = float(sv[j]), complex(sub[j])
        dx = 2.0 * hx / 40
    return best, zbest


def harmonic_measure_floor(eta: float, n_pieces: int, amplification: int) -> float:
    """Lower bound 4 eta / ((2 + N(a+1))^2 pi) for omega at edge-measure points."""
    if not 0 < eta <= 1:
        raise DomainError("eta must lie in (0, 1]")
    if n_pieces < 1 or amplification < 1:
        raise DomainError("N and a must be positive integers")
    return 4.0 * eta / ((2.0 + n_pieces * (amplification + 1)) ** 2 * np.pi)


# ---------------------------------------------------------------------------
# edge measure over subdivided covering intervals


@dataclass(frozen=True)
class EdgeMeasure:
    """Arc-length measure on the horizontal segments {x in I_n, y = |I_n|/N}."""

    intervals: tuple       # covering intervals (lo, hi)
    heights: tuple         # |I_n| / N per interval
    n_pieces: int

    @staticmethod
    def from_covering(cov: Covering, n_pieces: int) -> "EdgeMeasure":
        if n_pieces < 1:
            raise DomainError("N must be a positive integer")
        ivs = tuple(cov.intervals())
        hs = tuple((hi - lo) / n_pieces for lo, hi in ivs)
        return EdgeMeasure(intervals=ivs, heights=hs, n_pieces=int(n_pieces))

    def total_mass(self) -> float:
        return float(sum(hi - lo for lo, hi in self.intervals))


def mu_window_ratio(em: EdgeMeasure, interval) -> float:
    """mu(S(I))/|I|: segments strictly below height |I| contribute their
    overlap with I."""
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise DomainError("candidate interval must have positive length")
    width = hi - lo
    mass = 0.0
    for (a, b), h in zip(em.intervals, em.heights):
        if h < width:
            mass += max(0.0, min(b, hi) - max(a, lo))
    return mass / width


def _candidate_family(em: EdgeMeasure, max_union: int = 10, dyadic_levels: int = 4):
    """Covering intervals, contiguous unions up to max_union, and dyadic
    refinements of each down to dyadic_levels; finite and reproducible."""
    base = []
    n = len(em.intervals)
    for i in range(n):
        lo = em.intervals[i][0]
        for j in range(i, min(i + max_union, n)):
            base.append((lo, em.intervals[j][1]))
    out = []
    for lo, hi in base:
        out.append((lo, hi))
        for lev in range(1, dyadic_levels + 1):
            m = 2 ** lev
            edges = np.linspace(lo, hi, m + 1)
            out.extend((float(edges[k]), float(edges[k + 1])) for k in range(m))
    return out


def _admissible_mask(theta, epsilon, lo, hi, n0, probe=(12, 12), chunk=200_000):
    """Batched probe of S(I^{N0}) on log-y grids for every candidate."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * n0 * (hi - lo)
    width = 2.0 * half
    u = np.linspace(0.0, 1.0, probe[0])
    g = np.geomspace(1e-4, 1.0 - 1e-9, probe[1])
    out = np.zeros(lo.shape, dtype=bool)
    per = probe[0] * probe[1]
    step = max(1, chunk // per)
    for k0 in range(0, len(lo), step):
        sl = slice(k0, k0 + step)
        xs = (mid[sl, None] - half[sl, None]) + width[sl, None] * u[None, :]
        ys = width[sl, None] * g[None, :]
        pts = xs[:, :, None] + 1j * ys[:, None, :]
        mask = _sublevel_mask(theta, epsilon, pts.reshape(-1)).reshape(pts.shape)
        out[sl] = mask.any(axis=(1, 2))
    return out


def _mu_ratios(em: EdgeMeasure, lo, hi, chunk=2_000_000):
    """Batched mu(S(I))/|I| over candidate intervals."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = hi - lo
    a = np.array([iv[0] for iv in em.intervals])
    b = np.array([iv[1] for iv in em.intervals])
    h = np.array(em.heights)
    out = np.zeros(lo.shape)
    step = max(1, chunk // max(len(a), 1))
    for k0 in range(0, len(lo), step):
        sl = slice(k0, k0 + step)
        overlap = np.maximum(
            0.0, np.minimum(b[None, :], hi[sl, None]) - np.maximum(a[None, :], lo[sl, None]))
        counted = h[None, :] < width[sl, None]
        out[sl] = (overlap * counted).sum(axis=1) / width[sl]
    return out


def reverse_condition_inf(em: EdgeMeasure, theta: InnerFunction, epsilon: float,
                          n0: float = 1.0, candidates=None, probe=(12, 12)):
    """inf of mu(S(I))/|I| over candidates with S(I^{N0}) meeting L(Theta,eps).

    Returns (inf_value, worst_interval, n_admissible).  Raises
    EmptyFamilyError when no candidate is admissible.
    """
    if candidates is None:
        candidates = _candidate_family(em)
    lo = np.array([iv[0] for iv in candidates])
    hi = np.array([iv[1] for iv in candidates])
    adm = _admissible_mask(theta, epsilon, lo, hi, n0, probe=probe)
    n_adm = int(np.sum(adm))
    if n_adm == 0:
        raise EmptyFamilyError("no candidate interval passes the S(I^N0) test")
    ratios = _mu_ratios(em, lo[adm], hi[adm])
    k = int(np.argmin(ratios))
    worst = (float(lo[adm][k]), float(hi[adm][k]))
    return float(ratios[k]), worst, n_adm
