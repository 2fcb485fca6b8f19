"""Whitney-type coverings of a window driven by the distance d_eps.

Breakpoints (s_n) satisfy

    integral over [s_n, s_{n+1}] of 1/d_eps(x) dx = c,

grown in both directions from an anchor.  Interval lengths are then
comparable to d_eps (the measured comparability constant alpha_hat is
recorded on the covering).  The incomplete remainder at each window edge
is dropped from all analyses and kept as a flag.

Also home to the amplification/subdivision helpers and the reference-set
construction that picks, inside every amplified interval, a relatively
dense piece and its relatively dense tiles.
"""

import json
from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .errors import DensityError, DomainError, WindowTooSmallError
from .geometry import SublevelDistance, SublevelQuery
from .inner import InnerFunction
from .quadrature import _GL_NODES, _GL_WEIGHTS
from .sets import MeasurableSet, intersect_measure

_MESH_DENSITY = 32      # mesh nodes per unit of local d_eps
_SOLVE_RTOL = 1e-10     # relative accuracy of each breakpoint's defining integral


def amplify(interval, a: float):
    """Interval with the same center and a times the length; requires a >= 1."""
    if a < 1:
        raise DomainError("amplification factor must be >= 1")
    lo, hi = float(interval[0]), float(interval[1])
    c0 = 0.5 * (lo + hi)
    half = 0.5 * a * (hi - lo)
    return (c0 - half, c0 + half)


def subdivide(interval, m: int):
    """m contiguous equal half-open pieces whose union is the interval."""
    if m < 1:
        raise DomainError("piece count must be >= 1")
    edges = np.linspace(float(interval[0]), float(interval[1]), int(m) + 1)
    return [(float(edges[k]), float(edges[k + 1])) for k in range(int(m))]


def min_subdivision_count(alpha: float, n0: float, epsilon: float, p: float) -> int:
    """Smallest integer N with N >= max((1+alpha) sqrt(2) N0, 40 * 8^(1/p) * alpha/eps)."""
    if alpha < 1 or n0 <= 0 or not 0 < epsilon < 1 or p <= 0:
        raise DomainError("need alpha >= 1, N0 > 0, eps in (0,1), p > 0")
    v = max((1.0 + alpha) * sqrt(2.0) * n0, 40.0 * 8.0 ** (1.0 / p) * alpha / epsilon)
    r = round(v)
    if abs(v - r) <= 1e-9 * max(1.0, abs(v)):
        return int(r)
    return int(ceil(v))


# ---------------------------------------------------------------------------
# covering construction


def _gl_panel(f, lo, hi):
    """GL15 integral of f over one [lo, hi]."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return half * float(f(mid + half * _GL_NODES) @ _GL_WEIGHTS)


def _mesh_one_side(dist, start: float, stop: float, density: int):
    """Monotone mesh from start toward stop with spacing ~ d_eps/density.

    d_eps is 1-Lipschitz, so taking blocks of density//3 steps at the
    block-start spacing keeps the true spacing within 1.5x of nominal.
    Returns (nodes, d_values) with nodes[0] == start, nodes[-1] == stop.
    """
    direction = 1.0 if stop >= start else -1.0
    block = max(4, density // 3)
    nodes = [np.array([start])]
    dvals = [np.atleast_1d(dist(start))]
    cur = start
    d_cur = float(dvals[0][0])
    while (stop - cur) * direction > 0:
        h = d_cur / density * direction
        prop = cur + h * np.arange(1, block + 1)
        if direction > 0:
            prop = prop[prop < stop]
        else:
            prop = prop[prop > stop]
        prop = np.append(prop, stop) if prop.size < block else prop
        dv = np.atleast_1d(dist(prop))
        nodes.append(prop)
        dvals.append(dv)
        cur = float(prop[-1])
        d_cur = float(dv[-1])
    return np.concatenate(nodes), np.concatenate(dvals)


def _panel_integrals_of_reciprocal(dist, nodes):
    """GL15 of 1/d_eps over every consecutive panel of the mesh, batched."""
    lo = nodes[:-1]
    hi = nodes[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = 1.0 / np.asarray(dist(pts.ravel())).reshape(pts.shape)
    return half * (vals @ _GL_WEIGHTS), pts, vals


def _solve_batched(dist_fn, lo, hi, residuals, c, max_iter=80):
    """Solve integral of 1/d over [lo_i, s_i] = residuals_i for every i at once.

    All evaluations of the distance oracle are batched across the
    targets (safeguarded Newton; the cumulative integral is strictly
    increasing in the endpoint, so the panel brackets never fail).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    a = lo.copy()
    b = hi.copy()
    s = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + s)
        half = 0.5 * (s - lo)
        pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        fvals = 1.0 / np.asarray(dist_fn(pts.ravel())).reshape(pts.shape)
        g = half * (fvals @ _GL_WEIGHTS) - residuals
        if np.all(np.abs(g) <= _SOLVE_RTOL * c):
            break
        pos = g > 0
        b = np.where(pos, s, b)
        a = np.where(pos, a, s)
        fs = 1.0 / np.asarray(dist_fn(s))
        s_new = s - g / np.maximum(fs, 1e-300)
        inside = (s_new > a) & (s_new < b)
        s = np.where(inside, s_new, 0.5 * (a + b))
    return s


@dataclass(frozen=True)
class Covering:
    """Breakpoints of a built covering plus its defining parameters."""

    breakpoints: tuple
    c: float
    epsilon: float
    alpha_hat: float
    window: tuple
    anchor: float
    dropped_left: tuple | None = None
    dropped_right: tuple | None = None

    def intervals(self):
        bp = self.breakpoints
        return [(bp[k], bp[k + 1]) for k in range(len(bp) - 1)]

    def lengths(self) -> np.ndarray:
        bp = np.asarray(self.breakpoints)
        return np.diff(bp)

    @property
    def covered_span(self):
        return (self.breakpoints[0], self.breakpoints[-1])

    def to_dict(self) -> dict:
        return {
            "breakpoints": [float(v) for v in self.breakpoints],
            "c": self.c,
            "epsilon": self.epsilon,
            "alpha_hat": self.alpha_hat,
            "window": [self.window[0], self.window[1]],
            "anchor": self.anchor,
            "dropped_left": list(self.dropped_left) if self.dropped_left else None,
            "dropped_right": list(self.dropped_right) if self.dropped_right else None,
        }

    @staticmethod
    def from_dict(d: dict) -> "Covering":
        return Covering(
            breakpoints=tuple(d["breakpoints"]),
            c=float(d["c"]),
            epsilon=float(d["epsilon"]),
            alpha_hat=float(d["alpha_hat"]),
            window=tuple(d["window"]),
            anchor=float(d["anchor"]),
            dropped_left=tuple(d["dropped_left"]) if d.get("dropped_left") else None,
            dropped_right=tuple(d["dropped_right"]) if d.get("dropped_right") else None,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self, path):
        ivs = self.intervals()
        data = np.column_stack([
            np.arange(len(ivs)),
            [iv[0] for iv in ivs],
            [iv[1] for iv in ivs],
            [iv[1] - iv[0] for iv in ivs],
        ])
        np.savetxt(path, data, delimiter=",", fmt=["%d", "%.17g", "%.17g", "%.17g"],
                   header="n,lo,hi,length", comments="")


def build_covering(theta: InnerFunction, epsilon: float, c: float, window,
                   anchor: float = 0.0, query: SublevelQuery | None = None,
                   dist: SublevelDistance | None = None,
                   density: int = _MESH_DENSITY) -> Covering:
    """Construct the covering of the window by solving the defining integral.

    Each new breakpoint is located inside the bracketing mesh panel by a
    safeguarded Newton iteration on the cumulative quadrature (monotone in
    the endpoint, so always convergent).  Raises WindowTooSmallError when
    not even one interval fits inside the window.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise DomainError("window must have positive length")
    if not lo <= anchor <= hi:
        raise DomainError("anchor must lie inside the window")
    if c <= 0:
        raise DomainError("covering constant c must be positive")
    if dist is None:
        dist = SublevelDistance(theta, epsilon, query=query, window=(lo, hi))

    samples_x = []
    samples_d = []

    def one_side(stop):
        """Breakpoints from the anchor toward stop (any direction)."""
        if stop == anchor:
            return [], 0.0
        nodes, dv = _mesh_one_side(dist, anchor, stop, density)
        sgn = 1.0 if stop > anchor else -1.0
        panel_vals, pts, vals = _panel_integrals_of_reciprocal(dist, nodes)
        samples_x.append(pts.ravel())
        samples_d.append(1.0 / vals.ravel())
        cum = np.concatenate([[0.0], np.cumsum(sgn * panel_vals)])
        total = cum[-1]
        n_whole = int(np.floor(total / c + _SOLVE_RTOL))
        if n_whole == 0:
            return [], total
        targets = c * np.arange(1, n_whole + 1)
        j = np.clip(np.searchsorted(cum, targets, side="left"), 1, len(nodes) - 1)
        resid = targets - cum[j - 1]
        if sgn > 0:
            s = _solve_batched(dist, nodes[j - 1], nodes[j], resid, c)
            return list(s), total
        mirrored = _solve_batched(lambda t: dist(-np.asarray(t)),
                                  -nodes[j - 1], -nodes[j], resid, c)
        return list(-mirrored), total

    right, total_r = one_side(hi)
    left, total_l = one_side(lo)

    if not right and not left:
        raise WindowTooSmallError(
            f"window {window} too small: no interval of weight c={c} fits")

    breakpoints = tuple(sorted(left)) + (float(anchor),) + tuple(right)
    dropped_right = (breakpoints[-1], hi) if hi - breakpoints[-1] > 0 else None
    dropped_left = (lo, breakpoints[0]) if breakpoints[0] - lo > 0 else None

    # measured comparability constant over the construction samples
    xs = np.concatenate(samples_x)
    ds = np.concatenate(samples_d)
    bp = np.asarray(breakpoints)
    idx = np.searchsorted(bp, xs, side="right") - 1
    ok = (idx >= 0) & (idx < len(bp) - 1)
    lengths = np.diff(bp)
    li = lengths[idx[ok]]
    di = ds[ok]
    alpha_hat = float(max(np.max(li / di), np.max(di / li)))

    return Covering(breakpoints=breakpoints, c=float(c), epsilon=float(epsilon),
                    alpha_hat=alpha_hat, window=(lo, hi), anchor=float(anchor),
                    dropped_left=dropped_left, dropped_right=dropped_right)


def defining_integrals(theta: InnerFunction, cov: Covering,
                       panels_per_interval: int = 256,
                       query: SublevelQuery | None = None,
                       dist: SublevelDistance | None = None) -> np.ndarray:
    """Recompute the defining integral of every interval with a fresh
    composite rule (use doubled panels_per_interval for re-verification)."""
    if dist is None:
        dist = SublevelDistance(theta, cov.epsilon, query=query, window=cov.window)
    ivs = cov.intervals()
    los = np.concatenate([np.linspace(a, b, panels_per_interval + 1)[:-1] for a, b in ivs])
    his = np.concatenate([np.linspace(a, b, panels_per_interval + 1)[1:] for a, b in ivs])
    mid = 0.5 * (los + his)
    half = 0.5 * (his - los)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = 1.0 / np.asarray(dist(pts.ravel())).reshape(pts.shape)
    per_panel = half * (vals @ _GL_WEIGHTS)
    return per_panel.reshape(len(ivs), panels_per_interval).sum(axis=1)


# ---------------------------------------------------------------------------
# reference-set construction


@dataclass(frozen=True)
class SubdivisionPlan:
    """Bookkeeping of the reference-set construction.

    sigma[n] is the index (0-based) of the selected dense piece of the
    amplified interval n; A_sigma[n] are the (k, l) indices of unamplified
    tiles meeting that piece; A_zero[n] the subset whose clipped tiles are
    still gamma/2-dense; skipped lists intervals whose amplification left
    the tiled span.
    """

    a: int
    n_pieces: int
    sigma: dict
    A_sigma: dict
    A_zero: dict
    skipped: tuple
    tiles: dict  # (k, l) -> clipped tile interval actually selected, per n

    def selected_measure(self, n: int) -> float:
        return sum(hi - lo for (lo, hi) in self.tiles.get(n, ()))


def build_reference_set(cov: Covering, gamma_set: MeasurableSet, a: int, n_pieces: int,
                        gamma: float):
    """Select, per amplified interval, a gamma-dense piece and keep its
    gamma/2-dense tiles; the union over n is the reference set F.

    Requires each processed amplified interval to hold gamma of its
    length in gamma_set; the first failing n is reported.
    """
    if not 0 < gamma < 1:
        raise DomainError("gamma must lie in (0, 1)")
    a = int(a)
    if a < 1:
        raise DomainError("amplification a must be a positive integer")
    n_sub = int(n_pieces)
    if n_sub < 1:
        raise DomainError("piece count N must be a positive integer")

    intervals = cov.intervals()
    span_lo, span_hi = cov.covered_span
    bp = np.asarray(cov.breakpoints)
    slack = 1e-12

    # unamplified tiles: interval k subdivided into N pieces
    def tiles_overlapping(lo, hi):
        k0 = max(0, int(np.searchsorted(bp, lo, side="right")) - 1)
        k1 = min(len(intervals) - 1, int(np.searchsorted(bp, hi, side="left")) - 1)
        out = []
        for k in range(k0, k1 + 1):
            ik = intervals[k]
            width = (ik[1] - ik[0]) / n_sub
            l0 = max(0, int(np.floor((lo - ik[0]) / width)))
            l1 = min(n_sub - 1, int(np.ceil((hi - ik[0]) / width)))
            for l in range(l0, l1 + 1):
                t = (ik[0] + l * width, ik[0] + (l + 1) * width)
                if t[1] > lo and t[0] < hi:
                    out.append((k, l, t))
        return out

    sigma = {}
    a_sigma = {}
    a_zero = {}
    tiles_sel = {}
    skipped = []
    parts = []
    for n, iv in enumerate(intervals):
        amp = amplify(iv, a)
        if amp[0] < span_lo - slack * abs(span_lo) or amp[1] > span_hi + slack * abs(span_hi):
            skipped.append(n)
            continue
        pieces = subdivide(amp, a * n_sub)
        sig = None
        for k, pc in enumerate(pieces):
            want = gamma * (pc[1] - pc[0])
            if intersect_measure(gamma_set, pc) >= want * (1 - 1e-12):
                sig = k
                break
        if sig is None:
            raise DensityError(
                f"interval {n}: no piece of the amplified interval holds "
                f"gamma={gamma} of its length (density precondition fails)", index=n)
        sel = pieces[sig]
        asig = []
        azero = []
        chosen = []
        for (k, l, t) in tiles_overlapping(sel[0], sel[1]):
            clip = (max(t[0], sel[0]), min(t[1], sel[1]))
            if clip[1] <= clip[0]:
                continue
            asig.append((k, l))
            want = 0.5 * gamma * (clip[1] - clip[0])
            if intersect_measure(gamma_set, clip) >= want * (1 - 1e-12):
                azero.append((k, l))
                chosen.append(clip)
        sigma[n] = sig
        a_sigma[n] = tuple(asig)
        a_zero[n] = tuple(azero)
        tiles_sel[n] = tuple(chosen)
        parts.extend(chosen)

    ref = MeasurableSet.from_intervals(parts) if parts else MeasurableSet.empty()
    plan = SubdivisionPlan(a=a, n_pieces=n_sub, sigma=sigma, A_sigma=a_sigma,
                           A_zero=a_zero, skipped=tuple(skipped), tiles=tiles_sel)
    return ref, plan
