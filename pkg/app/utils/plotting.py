"""Deterministic SVG figures: lambda3, bifurcation diagrams and gamma cobwebs."""
import logging
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

from app.api.schemas import BifurcationRow, TwoCycle
from app.services.critical import lambda3
from app.reductions import gamma

logger = logging.getLogger(__name__)

SVG_RC = {
    "svg.hashsalt": "hardcore-boundary-laws",
    "svg.fonttype": "none",
    "path.simplify": False,
}
MINIMUM_MARKER_GID = "lambda3-minimum"


def _save(fig: Figure, path: str) -> None:
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    logger.info(f"Wrote {path}")


def lambda3_figure(x_min: float, x_max: float, x_star: float, lambda_cr: float, path: str, points: int = 2000) -> None:
    """lambda3 on [x_min, x_max] with its minimum marked; the pole at x = 1 is clipped."""
    xs = np.linspace(x_min, x_max, points)
    ys = lambda3(xs)
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(xs, ys, color="black", linewidth=1.2)
    marker = ax.plot([x_star], [lambda_cr], "o", color="tab:red")[0]
    marker.set_gid(MINIMUM_MARKER_GID)
    ax.annotate(f"({x_star:.6g}, {lambda_cr:.6g})", (x_star, lambda_cr), textcoords="offset points", xytext=(8, -14))
    top = min(float(np.nanmax(ys)), lambda_cr + 3.0)
    ax.set_ylim(lambda_cr - 0.25, top)
    ax.set_xlabel("x")
    ax.set_ylabel("lambda3(x)")
    _save(fig, path)


def bifurcation_figure(rows: Sequence[BifurcationRow], path: str, title: str = "") -> None:
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    for row in rows:
        for p in row.coordinates:
            color = "black" if abs(p.x - p.y) <= 1e-9 else "tab:blue"
            ax.plot([row.lam], [p.x], ".", color=color, markersize=4)
        if row.tangent:
            ax.axvline(row.lam, color="tab:red", linewidth=0.8, linestyle="--")
    ax.set_xlabel("lambda")
    ax.set_ylabel("x")
    if title:
        ax.set_title(title)
    _save(fig, path)


def gamma_cobweb_figure(k: int, lam: float, xi: float, cycle: TwoCycle, path: str, points: int = 1000) -> None:
    """gamma on [0, 1] with the diagonal, its fixed point and the 2-cycle as a closed cobweb."""
    right = min(1.0, 2.0 * max(cycle.x2 if cycle else xi, xi))
    xs = np.linspace(0.0, right, points)
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(xs, gamma(xs, k, lam), color="black", linewidth=1.2)
    ax.plot(xs, xs, color="grey", linewidth=0.8)
    ax.plot([xi], [xi], "o", color="tab:red")
    if cycle is not None:
        a, b = cycle.x1, cycle.x2
        ax.plot([a, a, b, b, a], [a, b, b, a, a], color="tab:blue", linewidth=1.0)
    ax.set_xlim(0.0, right)
    ax.set_ylim(0.0, right)
    ax.set_xlabel("x")
    ax.set_ylabel("gamma(x)")
    ax.set_title(f"k={k}, lambda={lam:g}")
    _save(fig, path)
