"""Matplotlib figure emitters for the report path.

Figures are rendered straight to files (Agg backend), one function per
artifact; no interactive state is touched.  SVG output drops the date
metadata so repeated runs produce stable files.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"bbox_inches": "tight", "metadata": {"Date": None}}


def _save(fig, path):
    if str(path).endswith(".svg"):
        fig.savefig(path, **_SAVE_KW)
    else:
        fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def covering_figure(cov, boundary_points, path, max_points: int = 20000):
    """Level-curve samples with the covering breakpoints ticked on the axis."""
    pts = np.asarray(boundary_points)
    if pts.size > max_points:
        pts = pts[:: pts.size // max_points + 1]
    fig, ax = plt.subplots(figsize=(9, 4))
    order = np.argsort(pts.real)
    ax.plot(pts.real[order], pts.imag[order], ".", ms=1.5, color="#0072B2",
            label=f"|Theta| = {cov.epsilon:g}")
    bp = np.asarray(cov.breakpoints)
    ax.plot(bp, np.zeros_like(bp), "|", ms=12, color="#D55E00", label="breakpoints")
    if pts.size and np.min(pts.imag) > 0 and np.max(pts.imag) / max(np.min(pts.imag), 1e-12) > 50:
        ax.set_yscale("log")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title(f"sublevel boundary and covering (c={cov.c:g}, alpha_hat={cov.alpha_hat:.3g})")
    _save(fig, path)


def volberg_heatmap_figure(xs, ys, values, argmin, path):
    """Heat map of |Theta(z)| + omega_z(Gamma) over the evaluation grid."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    mesh = ax.pcolormesh(xs, ys, values.T, shading="auto", cmap="viridis")
    ax.plot([argmin.real], [argmin.imag], "r*", ms=12, label="grid argmin")
    ax.set_yscale("log")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.colorbar(mesh, ax=ax, label="|Theta(z)| + omega_z(Gamma)")
    ax.legend(loc="upper right", fontsize=8)
    _save(fig, path)


def sweep_figure(gammas, c_emps, fits, path):
    """log C_emp against log(1/gamma) with the fitted polynomial law."""
    g = np.asarray(gammas, dtype=float)
    c = np.asarray(c_emps, dtype=float)
    x = np.log(1.0 / g)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(x, np.log(c), "o", color="#0072B2", label="measured")
    xs = np.linspace(x.min(), x.max(), 64)
    ax.plot(xs, fits["poly_slope"] * xs + (np.log(c) - fits["poly_slope"] * x).mean(),
            "-", color="#D55E00",
            label=f"slope {fits['poly_slope']:.3f}, R2 {fits['poly_r2']:.4f}")
    ax.set_xlabel("log(1/gamma)")
    ax.set_ylabel("log C_emp")
    ax.legend(fontsize=8)
    _save(fig, path)


def comparability_figure(profile, path):
    """d_eps, d_0, 1/|Theta'| and the comparability ratio over the grid."""
    fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax = axes[0]
    ax.plot(profile.x, profile.d_eps, label="d_eps", color="#0072B2")
    ax.plot(profile.x, profile.d_0, label="d_0", color="#009E73", alpha=0.7)
    ax.plot(profile.x, profile.inv_dtheta, label="1/|Theta'|", color="#D55E00", alpha=0.7)
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax = axes[1]
    ax.plot(profile.x, profile.ratio, color="#CC79A7")
    ax.set_ylabel("d_eps / min(d_0, 1/|Theta'|)")
    ax.set_xlabel("x")
    _save(fig, path)
