"""Fans of geodesics of M(0) drawn as SVG panels."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geodesics import TangentState, closed_form_geodesic, focusing_point

VIEW_X = (-4.0, 4.0)
VIEW_Y = (-math.pi - 0.5, math.pi + 0.5)
FAN_SLOPES = np.linspace(-3.0, 3.0, 13)


@dataclass(frozen=True)
class FanCurve:
    state: TangentState
    t: np.ndarray
    xy: np.ndarray


def geodesic_fan(base, slopes: Sequence[float] = FAN_SLOPES, n_samples: int = 201) -> list[FanCurve]:
    """Geodesics of ``M(0)`` from ``base`` with ``b = +-1`` and ``a`` over ``slopes``.

    Each curve is sampled on ``[0, pi + 0.5]`` with ``t = pi`` among the samples,
    which is where it meets the focusing point.
    """
    u, v = (float(z) for z in base)
    t = np.union1d(np.linspace(0.0, math.pi + 0.5, n_samples), [math.pi])
    curves = []
    for b in (1.0, -1.0):
        for a in slopes:
            s = TangentState(u, v, float(a), b)
            g = closed_form_geodesic(0.0, s)
            curves.append(FanCurve(s, t, np.array([g.position(tt) for tt in t])))
    return curves


def render_figure(bases: Sequence, path) -> None:
    """Write one panel per base point to ``path`` (SVG)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "affinezoll"
    n = len(bases)
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.6), squeeze=False)
    for k, (ax, base) in enumerate(zip(axes[0], bases)):
        u, v = (float(z) for z in base)
        ax.set_gid(f"panel-{k}")
        for curve in geodesic_fan((u, v)):
            color = "tab:blue" if curve.state.b > 0 else "tab:orange"
            ax.plot(curve.xy[:, 0], curve.xy[:, 1], color=color, lw=0.7)
        ax.axhline(v, color="k", ls="--", lw=1.0)
        for sgn in (1, -1):
            f = focusing_point(0.0, (u, v), sgn)
            ax.plot([f[0]], [f[1]], "o", color="crimson", ms=4)
        ax.plot([u], [v], "ks", ms=4)
        ax.set_xlim(*VIEW_X)
        ax.set_ylim(VIEW_Y[0] + v, VIEW_Y[1] + v)
        ax.set_title(f"base ({u:g}, {v:g})")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
