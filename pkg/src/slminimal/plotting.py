"""Optional figures rendered off-screen to image files.

matplotlib is imported lazily with the Agg backend so that the rest of the
package never needs a display or the plotting dependency.
"""

from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_sweep(rows: list, path) -> None:
    """Douglas margin and boundary gap against the neck parameter."""
    plt = _pyplot()
    rb = np.array([r["rho_bar"] for r in rows])
    margin = np.array([r["margin"] for r in rows])
    gap = np.array([r["gap"] for r in rows])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax1.plot(rb, margin, "o-", ms=3)
    ax1.axhline(0.0, color="k", lw=0.8)
    ax1.set_ylabel("2 area(D) - area(annulus)")
    ax1.set_yscale("symlog", linthresh=1e-2)
    ax2.plot(rb, gap, "o-", ms=3)
    ax2.set_xlabel("rho_bar")
    ax2.set_ylabel("boundary gap")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_height_profile(ps, heights, threshold: float, path, label: str = "p") -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    h = np.where(np.isfinite(heights), heights, np.nan)
    ax.plot(ps, h, lw=1.2, label="h(p)")
    ax.axhline(threshold, color="r", ls="--", lw=1.0, label="threshold")
    ax.set_xlabel(label)
    ax.set_ylabel("shortest vertical gap")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_solution(X, Y, U, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    cs = ax.contourf(X, Y, U, levels=30)
    fig.colorbar(cs, ax=ax, label="t")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_mesh(vertices, faces, path) -> None:
    plt = _pyplot()
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot_trisurf(vertices[:, 0], vertices[:, 1], vertices[:, 2], triangles=faces, cmap="viridis",
                    linewidth=0.1, antialiased=True)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
