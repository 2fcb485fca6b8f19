"""Sublevel sets L(Theta, eps) = {|Theta| < eps}, the distances d_eps and
d_0, and the comparability diagnostic d_eps(x) vs min(d_0(x), 1/|Theta'(x)|).

The level curve {|Theta| = eps} never touches the real axis (|Theta| = 1
there), so the distance from a real point to the open sublevel set equals
the distance to the curve.  The curve is located without any monotonicity
assumption: a coarse grid over the search box is classified into
inside/outside, straddling cells are refined (quadtree style, with cells
containing zeros of Theta force-refined so small components pinned to a
zero are not missed), and crossings are pinned by bisection along cell
edges.  A final constrained-projection polish (Newton onto the curve
along grad log|Theta|, plus a tangential slide toward the foot point)
brings the nearest-point distance down to refine_tol.  Every reported
distance is a rigorous upper bound: it is realized by a point on the
curve.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, LevelSetNotFoundError, ConstantInnerFunctionError
from .inner import InnerFunction

_STRADDLE_FRACTION = 0.08  # terminal cell size relative to its height above R
_MAX_DEPTH = 64


@dataclass(frozen=True)
class SublevelQuery:
    """Search-box description for level-curve extraction.

    refine_tol is absolute (same units as x); grid_resolution is the
    (nx, ny) corner count of the initial classification grid.
    """

    epsilon: float
    x_range: tuple
    y_range: tuple
    grid_resolution: tuple = (96, 64)
    refine_tol: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError("epsilon must lie in (0, 1)")
        if self.y_range[0] <= 0:
            raise DomainError("search box must have strictly positive y")
        if self.refine_tol <= 0:
            raise DomainError("refine_tol must be positive")


def default_query(window, epsilon: float, theta: InnerFunction | None = None,
                  refine_tol: float | None = None) -> SublevelQuery:
    """Default search box: window inflated by 50%, y in (1e-3 R, 10 R).

    When theta is supplied the y-range is widened to bracket its zeros,
    otherwise components hiding below/above the default band would be
    invisible to the grid pass.
    """
    lo, hi = float(window[0]), float(window[1])
    mid = 0.5 * (lo + hi)
    half = 0.75 * (hi - lo)
    scale = max(abs(lo), abs(hi), 0.5 * (hi - lo), 1e-6)
    y_lo, y_hi = 1e-3 * scale, 10.0 * scale
    if theta is not None and len(theta.zero_set) > 0:
        ims = [lam.imag for lam in theta.zero_set.zeros]
        y_lo = min(y_lo, 0.25 * min(ims))
        y_hi = max(y_hi, 4.0 * max(ims))
    if refine_tol is None:
        refine_tol = 1e-9 * scale
    return SublevelQuery(epsilon=float(epsilon), x_range=(mid - half, mid + half),
                         y_range=(y_lo, y_hi), refine_tol=refine_tol)


def in_sublevel(theta: InnerFunction, epsilon: float, z) -> bool:
    """Strict test |Theta(z)| < epsilon for a point of the open half-plane."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie in (0, 1)")
    z = complex(z)
    if not z.imag > 0:
        raise DomainError(f"point {z} is not in the open upper half-plane")
    return bool(theta.log_modulus(z) < np.log(epsilon))


def _sublevel_mask(theta: InnerFunction, epsilon: float, z: np.ndarray) -> np.ndarray:
    """Vectorized membership mask; no domain checks (internal probes)."""
    return theta.log_modulus(np.asarray(z, dtype=complex)) < np.log(epsilon)


# ---------------------------------------------------------------------------
# level-curve extraction


class _CellBatch:
    """Struct-of-arrays quadtree cells with corner values of log|Theta|-log eps."""

    def __init__(self, x0, x1, y0, y1, g00, g10, g01, g11, seed):
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.g00, self.g10, self.g01, self.g11 = g00, g10, g01, g11
        self.seed = seed  # cells that must refine because they contain a zero

    def __len__(self):
        return len(self.x0)

    def straddling(self):
        lo = np.minimum(np.minimum(self.g00, self.g10), np.minimum(self.g01, self.g11))
        hi = np.maximum(np.maximum(self.g00, self.g10), np.maximum(self.g01, self.g11))
        return (lo < 0) & (hi >= 0)

    def diag(self):
        return np.hypot(self.x1 - self.x0, self.y1 - self.y0)


def _edge_bisect(theta, log_eps, z_neg, z_pos, iters=48):
    """Bisect log|Theta| = log eps along segments from negative to positive side."""
    for _ in range(iters):
        zm = 0.5 * (z_neg + z_pos)
        neg = theta.log_modulus(zm) < log_eps
        z_neg = np.where(neg, zm, z_neg)
        z_pos = np.where(neg, z_pos, zm)
    return 0.5 * (z_neg + z_pos)


def extract_level_curve(theta: InnerFunction, query: SublevelQuery):
    """Sample the curve {|Theta| = eps} inside the search box.

    Returns (points, inside_witnesses): complex arrays.  Raises
    LevelSetNotFoundError when the box shows no trace of the sublevel set.
    """
    if theta.is_constant:
        raise ConstantInnerFunctionError("constant inner function has no sublevel set")
    eps = query.epsilon
    log_eps = float(np.log(eps))
    nx, ny = query.grid_resolution
    xs = np.linspace(query.x_range[0], query.x_range[1], nx + 1)
    ys = np.geomspace(query.y_range[0], query.y_range[1], ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    G = theta.log_modulus(X + 1j * Y) - log_eps

    inside = (X + 1j * Y)[G < 0]

    x0 = np.repeat(xs[:-1], ny)
    x1 = np.repeat(xs[1:], ny)
    y0 = np.tile(ys[:-1], nx)
    y1 = np.tile(ys[1:], nx)
    g00 = G[:-1, :-1].ravel()
    g10 = G[1:, :-1].ravel()
    g01 = G[:-1, 1:].ravel()
    g11 = G[1:, 1:].ravel()

    zeros = np.asarray(theta.zero_set.zeros, dtype=complex) if len(theta.zero_set) else np.zeros(0, complex)

    def contains_zero(cx0, cx1, cy0, cy1):
        if zeros.size == 0:
            return np.zeros(cx0.shape, dtype=bool)
        zx, zy = zeros.real, zeros.imag
        hit = (cx0[:, None] <= zx) & (zx < cx1[:, None]) & (cy0[:, None] <= zy) & (zy < cy1[:, None])
        return hit.any(axis=1)

    # seed-size floor: a component around an isolated zero has diameter of
    # order eps * Im(lam); refining a little below that cannot miss it
    if zeros.size:
        seed_floor = max(min(1e-3, 0.3 * eps) * float(np.min(zeros.imag)), 4 * query.refine_tol)
    else:
        seed_floor = 4 * query.refine_tol

    cells = _CellBatch(x0, x1, y0, y1, g00, g10, g01, g11, contains_zero(x0, x1, y0, y1))

    term_edges_neg = []
    term_edges_pos = []

    for _ in range(_MAX_DEPTH):
        if len(cells) == 0:
            break
        strad = cells.straddling()
        diag = cells.diag()
        target = _STRADDLE_FRACTION * np.maximum(0.5 * (cells.y0 + cells.y1), 1e-300)
        done = strad & (diag <= np.maximum(target, 4 * query.refine_tol))
        refine = (strad & ~done) | (cells.seed & ~strad & (diag > seed_floor))

        # harvest crossing edges of finished cells
        if np.any(done):
            cb = _CellBatch(*(arr[done] for arr in (cells.x0, cells.x1, cells.y0, cells.y1,
                                                    cells.g00, cells.g10, cells.g01, cells.g11)),
                            cells.seed[done])
            for (ga, gb, za, zb) in (
                (cb.g00, cb.g10, cb.x0 + 1j * cb.y0, cb.x1 + 1j * cb.y0),
                (cb.g01, cb.g11, cb.x0 + 1j * cb.y1, cb.x1 + 1j * cb.y1),
                (cb.g00, cb.g01, cb.x0 + 1j * cb.y0, cb.x0 + 1j * cb.y1),
                (cb.g10, cb.g11, cb.x1 + 1j * cb.y0, cb.x1 + 1j * cb.y1),
            ):
                cross = (ga < 0) != (gb < 0)
                if np.any(cross):
                    a, b = za[cross], zb[cross]
                    swap = gb[cross] < 0
                    term_edges_neg.append(np.where(swap, b, a))
                    term_edges_pos.append(np.where(swap, a, b))

        if not np.any(refine):
            break

        # split the longer side of each refined cell (cells from the
        # geometric y grid are extremely anisotropic; isotropic splits
        # would multiply straddling pancake cells instead of shrinking them)
        rx0, rx1 = cells.x0[refine], cells.x1[refine]
        ry0, ry1 = cells.y0[refine], cells.y1[refine]
        rg00, rg10 = cells.g00[refine], cells.g10[refine]
        rg01, rg11 = cells.g01[refine], cells.g11[refine]
        wide = (rx1 - rx0) >= (ry1 - ry0)

        parts = []
        if np.any(wide):
            x0w, x1w, y0w, y1w = rx0[wide], rx1[wide], ry0[wide], ry1[wide]
            xc = 0.5 * (x0w + x1w)
            pts_new = np.concatenate([xc + 1j * y0w, xc + 1j * y1w])
            gv = theta.log_modulus(pts_new) - log_eps
            n = len(x0w)
            gb, gt = gv[:n], gv[n:]
            parts.append((np.concatenate([x0w, xc]), np.concatenate([xc, x1w]),
                          np.concatenate([y0w, y0w]), np.concatenate([y1w, y1w]),
                          np.concatenate([rg00[wide], gb]), np.concatenate([gb, rg10[wide]]),
                          np.concatenate([rg01[wide], gt]), np.concatenate([gt, rg11[wide]])))
            if np.any(gv < 0):
                inside = np.concatenate([inside, pts_new[gv < 0]])
        tall = ~wide
        if np.any(tall):
            x0t, x1t, y0t, y1t = rx0[tall], rx1[tall], ry0[tall], ry1[tall]
            yc = 0.5 * (y0t + y1t)
            pts_new = np.concatenate([x0t + 1j * yc, x1t + 1j * yc])
            gv = theta.log_modulus(pts_new) - log_eps
            n = len(x0t)
            gl, gr = gv[:n], gv[n:]
            parts.append((np.concatenate([x0t, x0t]), np.concatenate([x1t, x1t]),
                          np.concatenate([y0t, yc]), np.concatenate([yc, y1t]),
                          np.concatenate([rg00[tall], gl]), np.concatenate([rg10[tall], gr]),
                          np.concatenate([gl, rg01[tall]]), np.concatenate([gr, rg11[tall]])))
            if np.any(gv < 0):
                inside = np.concatenate([inside, pts_new[gv < 0]])

        child = [np.concatenate([p[k] for p in parts]) for k in range(8)]
        seed = contains_zero(child[0], child[1], child[2], child[3])
        cells = _CellBatch(*child, seed)

    if term_edges_neg:
        z_neg = np.concatenate(term_edges_neg)
        z_pos = np.concatenate(term_edges_pos)
        pts = _edge_bisect(theta, log_eps, z_neg, z_pos)
    else:
        pts = np.zeros(0, dtype=complex)

    if pts.size == 0 and inside.size == 0:
        raise LevelSetNotFoundError(
            f"level set {{|Theta| = {eps}}} not found in box "
            f"x={query.x_range}, y={query.y_range}")
    return pts, inside


# ---------------------------------------------------------------------------
# distance evaluation


def _project_to_curve(theta, log_eps, x, z, refine_tol, max_iter=80):
    """Slide curve points toward the feet of perpendiculars from real x.

    x (float array) and z (complex array, near the curve) have equal
    shapes.  Each round is a Newton correction onto the curve along
    grad log|Theta| followed by a Newton step on the arclength
    parameter of half the squared distance: with t = i conj(L)/|L| the
    unit tangent (L = Theta'/Theta), phi' = Re(conj(z-x) t) and
    phi'' = 1 + Re(conj(z-x) c'') with c'' the curvature vector, both
    in closed form.  Dividing by phi'' is what makes the foot points
    attracting; the plain tangential step diverges whenever
    curvature * distance exceeds 1 (e.g. just outside a small oval of
    the sublevel set).  The best on-curve iterate is tracked and
    returned, so the result never regresses behind an intermediate
    state; entries are non-finite where the iteration failed entirely.
    """
    x = np.asarray(x, dtype=float).ravel()
    z_all = np.asarray(z, dtype=complex).ravel().copy()
    tiny = 1e-300
    best_z = np.full(z_all.shape, np.nan, dtype=complex)
    best_d = np.full(z_all.shape, np.inf)

    # the foot-point Newton converges quadratically, so most entries
    # retire after a few rounds; iterate only the active remainder
    idx = np.arange(z_all.size)
    z = z_all.copy()
    xs = x.copy()
    for _ in range(max_iter):
        logm, L, Lp = theta._distance_data(z)
        u = logm - log_eps
        absL = np.where(np.abs(L) > tiny, np.abs(L), 1.0)
        safe = np.abs(L) > tiny

        d = np.abs(z - xs)
        hit = safe & (np.abs(u) < 1e-9) & (d < best_d[idx])
        best_d[idx[hit]] = d[hit]
        best_z[idx[hit]] = z[hit]

        z = z - np.where(safe, u * np.conj(L) / absL ** 2, np.nan)
        t_hat = 1j * np.conj(L) / absL
        # curvature vector of the level curve at z (u is harmonic there)
        dl_ds = Lp * t_hat
        curv = 1j * (np.conj(dl_ds) / absL
                     - np.conj(L) * np.real(np.conj(L) * dl_ds) / absL ** 3)
        off = z - xs
        phi1 = np.real(np.conj(off) * t_hat)
        phi2 = 1.0 + np.real(np.conj(off) * curv)
        s = -phi1 / np.maximum(phi2, 0.2)
        cap = 0.45 * np.abs(off) + tiny
        s = np.clip(s, -cap, cap)
        z = z + s * t_hat
        z = np.where(z.imag > 0, z, z.real + 1j * tiny)

        pending = ~(np.abs(s) < 0.25 * refine_tol) & np.isfinite(z)
        z_all[idx] = z
        if not np.any(pending):
            break
        idx = idx[pending]
        z = z[pending]
        xs = xs[pending]
    # land exactly on the curve so the distance stays a true upper bound
    z = z_all
    for _ in range(3):
        logm, L, _ = theta._distance_data(z)
        absL2 = np.abs(L) ** 2
        u = logm - log_eps
        z = z - np.where(absL2 > tiny, u * np.conj(L) / np.where(absL2 > tiny, absL2, 1.0), np.nan)
    final_u = np.abs(theta.log_modulus(z) - log_eps)
    final_ok = np.isfinite(z) & (final_u < 1e-9)
    final_d = np.where(final_ok, np.abs(z - x), np.inf)
    return np.where(final_d <= best_d, z, best_z)


class SublevelDistance:
    """Distance oracle d_eps(x) = dist(x, L(Theta, eps)) for a fixed box.

    Extraction happens once at construction; individual evaluations are a
    KD-tree candidate lookup plus the projection polish.  The oracle is
    deterministic: identical inputs give bit-identical outputs.
    """

    def __init__(self, theta: InnerFunction, epsilon: float, query: SublevelQuery | None = None,
                 window=None):
        if query is None:
            if window is None:
                raise DomainError("either query or window must be given")
            query = default_query(window, epsilon, theta=theta)
        if abs(query.epsilon - epsilon) > 1e-15 * max(1.0, epsilon):
            raise DomainError("query.epsilon disagrees with the epsilon argument")
        self.theta = theta
        self.epsilon = float(epsilon)
        self.query = query
        self._log_eps = float(np.log(epsilon))
        pts, inside = extract_level_curve(theta, query)
        self._pts = pts if pts.size else inside
        self._tree = cKDTree(np.column_stack([self._pts.real, self._pts.imag]))

    @property
    def boundary_points(self) -> np.ndarray:
        return self._pts

    def candidates(self, x, k: int = 1):
        """k nearest extracted curve samples per query point (no polish)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        d, idx = self._tree.query(np.column_stack([x, np.zeros_like(x)]), k=k)
        return d, self._pts[idx]

    def __call__(self, x, seeds: int = 4):
        """d_eps at scalar or array x; always a positive upper-bound witness.

        The polish starts from several nearest curve samples: near a
        pinch of the level curve the single closest sample can sit on a
        sheet whose perpendicular foot is slightly farther than another
        sheet's.  When the box saw only interior points (no crossing
        edges), the candidates are themselves set members, so the
        minimum below is still an upper bound; the polish projects them
        onto the true curve, possibly outside the box.
        """
        x_in = np.asarray(x, dtype=float)
        xf = np.atleast_1d(x_in).astype(float)
        k = int(min(max(seeds, 1), self._pts.size))
        d_cand, z_cand = self.candidates(xf, k=k)
        if k == 1:
            d_cand = d_cand[:, None]
            z_cand = z_cand[:, None]
        x_rep = np.repeat(xf[:, None], k, axis=1)
        z_pol = _project_to_curve(self.theta, self._log_eps, x_rep.ravel(),
                                  z_cand.ravel(), self.query.refine_tol)
        z_pol = z_pol.reshape(x_rep.shape)
        d_pol = np.abs(x_rep + 0j - z_pol)
        on_curve = np.abs(self.theta.log_modulus(z_pol) - self._log_eps) < 1e-7
        best_cand = d_cand[:, 0]
        good = np.isfinite(d_pol) & on_curve & \
            (d_pol <= best_cand[:, None] * (1 + 1e-12) + self.query.refine_tol)
        d = np.where(good, d_pol, np.inf).min(axis=1)
        d = np.minimum(d, best_cand)
        return d[0] if x_in.ndim == 0 else d.reshape(x_in.shape)


def dist_to_sublevel(theta: InnerFunction, epsilon: float, x, query: SublevelQuery | None = None,
                     window=None) -> float:
    """One-shot d_eps(x). Builds the level-curve cache, so prefer
    SublevelDistance when evaluating many points of the same instance."""
    if window is None and query is None:
        x0 = float(np.min(x)) if np.ndim(x) else float(x)
        x1 = float(np.max(x)) if np.ndim(x) else float(x)
        span = max(1.0, abs(x0), abs(x1))
        window = (x0 - span, x1 + span)
    dist = SublevelDistance(theta, epsilon, query=query, window=window)
    return dist(x)


def dist_to_spectrum(theta: InnerFunction, x):
    """d_0(x) = distance to the zero list; +inf when only the point at
    infinity remains (tau > 0, no zeros); error for a constant function."""
    if theta.is_constant:
        raise ConstantInnerFunctionError("constant inner function has empty spectrum")
    x = np.asarray(x, dtype=float)
    if len(theta.zero_set) == 0:
        out = np.full(x.shape, np.inf)
        return out[()] if out.ndim == 0 else out
    zs = np.asarray(theta.zero_set.zeros, dtype=complex)
    d = np.min(np.abs(x[..., None] - zs[None, ...]), axis=-1)
    return d[()] if np.ndim(d) == 0 else d


@dataclass(frozen=True)
class DistanceProfile:
    """Per-point table of d_eps, d_0, 1/|Theta'| and the comparability ratio."""

    x: np.ndarray
    d_eps: np.ndarray
    d_0: np.ndarray
    inv_dtheta: np.ndarray
    ratio: np.ndarray

    @property
    def ratio_min(self) -> float:
        return float(np.min(self.ratio))

    @property
    def ratio_max(self) -> float:
        return float(np.max(self.ratio))

    def to_csv(self, path):
        data = np.column_stack([self.x, self.d_eps, self.d_0, self.inv_dtheta, self.ratio])
        np.savetxt(path, data, delimiter=",", fmt="%.17g",
                   header="x,d_eps,d_0,inv_dtheta,ratio", comments="")


def comparability_report(theta: InnerFunction, epsilon: float, grid,
                         query: SublevelQuery | None = None, window=None) -> DistanceProfile:
    """Tabulate d_eps(x) / min(d_0(x), 1/|Theta'(x)|) over a grid of real x."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("grid must be nonempty")
    if window is None and query is None:
        span = float(np.max(grid) - np.min(grid))
        pad = 0.5 * max(span, 1.0)
        window = (float(np.min(grid)) - pad, float(np.max(grid)) + pad)
    dist = SublevelDistance(theta, epsilon, query=query, window=window)
    d_eps = np.atleast_1d(dist(grid))
    d_0 = np.atleast_1d(dist_to_spectrum(theta, grid))
    inv_dt = 1.0 / np.atleast_1d(theta.boundary_derivative_modulus(grid))
    comparator = np.minimum(d_0, inv_dt)
    ratio = d_eps / comparator
    return DistanceProfile(x=grid, d_eps=d_eps, d_0=d_0, inv_dtheta=inv_dt, ratio=ratio)
