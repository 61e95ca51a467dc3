"""PNG figures for the CLI tables (headless Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# no Software/date chunks, so reruns give identical files
_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path


def plot_cloud(points, values, path, title=""):
    """Scatter of chart points coloured by a per-point scalar (2D or 3D)."""
    pts = np.asarray(points, dtype=float)
    fig = plt.figure(figsize=(6, 6))
    if pts.shape[1] == 3:
        ax = fig.add_subplot(projection="3d")
        sc = ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], c=values, s=1, cmap="viridis")
    else:
        ax = fig.add_subplot()
        x = pts[:, 0]
        y = pts[:, 1] if pts.shape[1] > 1 else np.zeros_like(x)
        sc = ax.scatter(x, y, c=values, s=1, cmap="viridis")
        ax.set_aspect("equal")
    fig.colorbar(sc, ax=ax, shrink=0.7)
    ax.set_title(title)
    return _save(fig, path)


def plot_loglog(estimate, path, xlabel="log 1/eps", ylabel="log N"):
    """Samples of a DimEstimate with the fitted line over its range."""
    s = np.array([t[1:] for t in estimate.samples], dtype=float)
    lab = np.array([t[0] for t in estimate.samples])
    lo, hi = estimate.fit_range
    sel = (lab >= lo) & (lab <= hi)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(s[:, 0], s[:, 1], "o", mfc="none", color="0.5", label="all scales")
    ax.plot(s[sel, 0], s[sel, 1], "o", color="C0", label="fit range")
    xs = s[sel, 0]
    slope = estimate.slope
    ax.plot(xs, slope * xs + estimate.intercept, "-", color="C3",
            label=f"slope {slope:.3f}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    return _save(fig, path)


def plot_minkowski(rows, path):
    """Dimension estimates along the eps schedule (one or two curves)."""
    m = [r["m"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(m, [r["dimension"] for r in rows], ".-", label="lower volume" if "upper" in rows[0] else "estimate")
    if "upper" in rows[0]:
        ax.plot(m, [r["dimension_upper"] for r in rows], ".-", label="upper volume")
    ax.set_xlabel("m  (eps = base^-m)")
    ax.set_ylabel("n - log V / log eps")
    ax.legend()
    return _save(fig, path)


def plot_radii(radius, path, slope=None, intercept=None):
    k = np.arange(1, len(radius) + 1)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(k, radius, ".", ms=2)
    if slope is not None:
        ax.loglog(k, np.exp(intercept) * k**slope, "-", color="C3", label=f"k^{slope:.3f}")
        ax.legend()
    ax.set_xlabel("k")
    ax.set_ylabel("radius")
    return _save(fig, path)


def plot_section(points, path):
    pts = np.asarray(points, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 5))
    if pts.shape[1] == 1:
        pts = np.column_stack([pts[:, 0], np.arange(len(pts))])
    ax.plot(pts[:, 0], pts[:, 1], ".-")
    ax.plot(pts[-1:, 0], pts[-1:, 1], "o", color="C3")
    return _save(fig, path)
