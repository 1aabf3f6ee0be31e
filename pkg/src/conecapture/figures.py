"""Matplotlib renderings of the domains, overlays, and report plots.

Everything is drawn from the computed geometry (no hand-placed curves)
and saved as SVG so reports stay windowing-free and diffable.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cone_spectra import vertex_angle_delta
from .perturbed_domain import (NodalDomainSpec, h_function, stereo,
                               stereo_inv, t2_boundary_beta)

_SECTOR = 2.0 * math.pi / 3.0


def _stereo_xy(p: np.ndarray) -> np.ndarray:
    """Stereographic image (x, y) / (1 + z) of unit vectors (rows)."""
    return p[:, :2] / (1.0 + p[:, 2:3])


def _great_arc(p1: np.ndarray, p2: np.ndarray, num: int = 128) -> np.ndarray:
    """Points along the great-circle arc between two unit vectors."""
    ang = math.acos(float(np.clip(p1 @ p2, -1.0, 1.0)))
    t = np.linspace(0.0, 1.0, num)[:, None]
    pts = (np.sin((1.0 - t) * ang) * p1 + np.sin(t * ang) * p2) / math.sin(ang)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _sphral(r: float, theta: float) -> np.ndarray:
    """Unit vector at polar distance r, azimuth theta from (0, 0, 1)."""
    return np.array([math.sin(r) * math.cos(theta),
                     math.sin(r) * math.sin(theta), math.cos(r)])


def figure_domains(path: str | Path) -> Path:
    """Schematic of the pursuit angle for two predators: the 2pi/3 arc on
    the circle and the lune it spans on the sphere."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 4))
    t = np.linspace(0.0, 2.0 * math.pi, 256)
    ax1.plot(np.cos(t), np.sin(t), color="0.7", lw=1)
    arc = np.linspace(0.0, _SECTOR, 128)
    ax1.plot(np.cos(arc), np.sin(arc), color="C0", lw=3)
    for a in (0.0, _SECTOR):
        ax1.plot([0, math.cos(a)], [0, math.sin(a)], color="0.4", lw=1,
                 ls="--")
    ax1.annotate("T1", xy=(math.cos(_SECTOR / 2), math.sin(_SECTOR / 2)),
                 xytext=(1.25 * math.cos(_SECTOR / 2),
                         1.25 * math.sin(_SECTOR / 2)), ha="center")
    ax1.set_title("arc of the pursuit angle (n = 2)")
    ax1.set_aspect("equal")
    ax1.axis("off")

    ax2.plot(np.cos(t), np.sin(t), color="0.7", lw=1)
    # lune between two meridians through the poles, orthographic view
    s = np.linspace(-math.pi / 2, math.pi / 2, 128)
    for az, style in ((0.35, "-"), (-0.55, "-")):
        x = np.cos(s) * math.sin(az)
        ax2.plot(x, np.sin(s), color="C0", lw=2, ls=style)
    ax2.plot([0, 0], [-1, 1], color="0.4", lw=1, ls=":")
    ax2.fill_betweenx(np.sin(s), np.cos(s) * math.sin(-0.55),
                      np.cos(s) * math.sin(0.35), color="C0", alpha=0.15)
    ax2.annotate("D2", xy=(0.0, 0.25))
    ax2.set_title("double cone over the arc")
    ax2.set_aspect("equal")
    ax2.axis("off")

    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def figure_stereographic_overlay(spec: NodalDomainSpec | None,
                                 path: str | Path,
                                 grid: int = 400) -> Path:
    """Stereographic overlay: the triangle's boundary arc (inner dashed),
    the zero curve of the perturbed-mode profile (solid), and the
    comparison cone's circle (outer dashed)."""
    if spec is None:
        spec = NodalDomainSpec()
    fig, ax = plt.subplots(figsize=(6, 5))

    theta = np.linspace(0.0, _SECTOR, 512)
    beta = t2_boundary_beta(theta)
    ax.plot(beta * np.cos(theta), beta * np.sin(theta), "C0--", lw=1.5,
            label="triangle boundary arc")

    rho_hat = stereo(vertex_angle_delta(2))
    ax.plot(rho_hat * np.cos(theta), rho_hat * np.sin(theta), "C2--",
            lw=1.5, label="comparison cone")

    # zero set of the reduced profile H bounds the perturbed domain
    rho = np.linspace(1e-3, 1.15 * rho_hat, grid)
    th = np.linspace(1e-4, _SECTOR - 1e-4, grid)
    rr = stereo_inv(rho)
    hv = h_function(spec, rr[:, None], th[None, :])
    x = rho[:, None] * np.cos(th)[None, :]
    y = rho[:, None] * np.sin(th)[None, :]
    ax.contour(x, y, hv, levels=[0.0], colors="C1", linewidths=2)
    ax.plot([], [], "C1-", lw=2, label="perturbed domain boundary")

    for a in (0.0, _SECTOR):
        ax.plot([0, 1.1 * rho_hat * math.cos(a)],
                [0, 1.1 * rho_hat * math.sin(a)], color="0.4", lw=1)
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("triangle, perturbed domain, and comparison cone")

    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def figure_sixth_triangle(path: str | Path) -> Path:
    """The triangle folded by its reflection symmetries into six congruent
    right triangles; one of them carries the collocation computation."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    theta = np.linspace(0.0, _SECTOR, 512)
    beta = t2_boundary_beta(theta)
    ax.plot(beta * np.cos(theta), beta * np.sin(theta), "C0", lw=1.5)
    v0 = _sphral(0.0, 0.0)
    r_v = stereo_inv(t2_boundary_beta(0.0))
    v1 = _sphral(r_v, 0.0)
    v2 = _sphral(r_v, _SECTOR)
    for v in (v1, v2):
        xy = _stereo_xy(np.vstack([v0, v]))
        ax.plot(xy[:, 0], xy[:, 1], "C0", lw=1.5)

    # medians: vertex -> midpoint of the opposite side, through the centre
    mid_far = _sphral(vertex_angle_delta(2), _SECTOR / 2.0)
    mids = {
        0: mid_far,
        1: _great_arc(v0, v2, 3)[1],
        2: _great_arc(v0, v1, 3)[1],
    }
    for vert, mid in zip((v0, v1, v2), (mids[0], mids[1], mids[2])):
        arc = _great_arc(vert, mid, 96)
        xy = _stereo_xy(arc)
        ax.plot(xy[:, 0], xy[:, 1], color="0.5", lw=1, ls="--")

    centre = _sphral(math.atan(2.0 * math.sqrt(2.0)), _SECTOR / 2.0)
    cx, cy = _stereo_xy(centre[None, :])[0]
    ax.plot([cx], [cy], "ko", ms=4)
    ax.annotate("F", (cx, cy), textcoords="offset points", xytext=(6, 4))
    x1, y1 = _stereo_xy(v1[None, :])[0]
    ax.plot([x1], [y1], "ko", ms=4)
    ax.annotate("T1", (x1, y1), textcoords="offset points", xytext=(6, 4))
    sx, sy = _stereo_xy(mids[2][None, :])[0]
    ax.plot([sx], [sy], "ko", ms=4)
    ax.annotate("S3", (sx, sy), textcoords="offset points", xytext=(6, -10))
    ax.set_aspect("equal")
    ax.set_title("six-fold decomposition of the triangle")
    ax.axis("off")

    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_survival(curve, fit, predicted: float | None,
                  path: str | Path) -> Path:
    """Log-log survival curve with the fitted and predicted slopes."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    good = curve.survival > 0.0
    ax.loglog(curve.times[good], curve.survival[good], "C0.", ms=3,
              label="empirical survival")
    lo = np.clip(curve.survival - 2 * curve.stderr, 1e-12, None)
    hi = curve.survival + 2 * curve.stderr
    ax.fill_between(curve.times[good], lo[good], hi[good], color="C0",
                    alpha=0.2, lw=0)
    if fit is not None:
        t0, t1 = fit.window
        anchor_i = np.argmin(np.abs(curve.times - t0))
        c = curve.survival[anchor_i] * curve.times[anchor_i] ** fit.a_hat
        tt = np.geomspace(t0, t1, 50)
        ax.loglog(tt, c * tt ** (-fit.a_hat), "C1-", lw=2,
                  label=f"fit slope -{fit.a_hat:.3f}")
        if predicted is not None:
            ax.loglog(tt, c * (tt / t0) ** (-predicted)
                      * curve.survival[anchor_i], "C2--", lw=1.5,
                      label=f"predicted slope -{predicted:.3f}")
    ax.set_xlabel("time")
    ax.set_ylabel("P(capture later than t)")
    ax.legend(fontsize=8)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_convergence(rows: list[dict], fd_reference: float | None,
                     path: str | Path) -> Path:
    """Collocation eigenvalue estimates against dimension."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    dims = [r["dim"] for r in rows]
    est = [r["lambda_estimate"] for r in rows]
    ax.semilogx(dims, est, "C0o-", label="collocation estimate")
    if fd_reference is not None:
        ax.axhline(fd_reference, color="C1", ls="--",
                   label=f"finite-difference reference {fd_reference:.4f}")
    ax.set_xlabel("collocation dimension")
    ax.set_ylabel("eigenvalue estimate")
    ax.legend(fontsize=8)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path
