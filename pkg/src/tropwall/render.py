"""Render a scattering diagram to an SVG figure.

Walls are drawn as segments clipped to a square viewport: lines through
their base in both directions, rays from their base forward only.  Each
distinct charge class gets a deterministic color, bases and crossing
points are marked, and every wall carries a small class label.  The SVG
bytes are reproducible run to run (fixed hash salt, no timestamps).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
]


def _viewport(diagram, margin=Fraction(2)):
    xs, ys = [], []
    for w in diagram.walls:
        xs.append(w.base[0])
        ys.append(w.base[1])
    for p in diagram.crossing_points():
        xs.append(p[0])
        ys.append(p[1])
    if not xs:
        xs = ys = [Fraction(0)]
    lo = min(min(xs), min(ys)) - margin
    hi = max(max(xs), max(ys)) + margin
    return lo, hi


def _clip_param(base, direction, lo, hi, forward_only):
    """Largest parameter range [t0, t1] keeping base + t*direction in box."""
    t0 = Fraction(0) if forward_only else None
    t1 = None
    lo_t, hi_t = [], []
    for b, d in zip(base, direction):
        if d == 0:
            if not (lo <= b <= hi):
                return None
            continue
        a = (lo - b) / d
        c = (hi - b) / d
        lo_t.append(min(a, c))
        hi_t.append(max(a, c))
    tmin = max(lo_t) if lo_t else lo
    tmax = min(hi_t) if hi_t else hi
    if forward_only:
        tmin = max(tmin, Fraction(0))
    if tmin >= tmax:
        return None
    return tmin, tmax


def render_svg(diagram, path: str, title: Optional[str] = None) -> None:
    lo, hi = _viewport(diagram)
    classes = sorted({w.charge_class for w in diagram.walls})
    color = {c: _PALETTE[i % len(_PALETTE)] for i, c in enumerate(classes)}

    fig, ax = plt.subplots(figsize=(6, 6))
    walls = sorted(
        diagram.walls, key=lambda w: (w.charge_class, tuple(w.base), w.kind)
    )
    for w in walls:
        span = _clip_param(w.base, w.direction, lo, hi, w.kind == "ray")
        if span is None:
            continue
        t0, t1 = span
        x = [float(w.base[0] + t * w.direction[0]) for t in (t0, t1)]
        y = [float(w.base[1] + t * w.direction[1]) for t in (t0, t1)]
        c = color[w.charge_class]
        ax.plot(x, y, color=c, linewidth=1.6)
        ax.plot([float(w.base[0])], [float(w.base[1])], "o", color=c, markersize=4)
        label = ",".join(str(v) for v in w.charge_class)
        tm = t0 + (t1 - t0) * Fraction(2, 3)
        ax.annotate(
            label,
            (float(w.base[0] + tm * w.direction[0]),
             float(w.base[1] + tm * w.direction[1])),
            fontsize=8, color=c,
            textcoords="offset points", xytext=(4, 4),
        )
    for p in sorted(diagram.crossing_points()):
        ax.plot([float(p[0])], [float(p[1])], "k+", markersize=8)
    ax.set_xlim(float(lo), float(hi))
    ax.set_ylim(float(lo), float(hi))
    ax.set_aspect("equal")
    ax.grid(True, linewidth=0.3, alpha=0.5)
    if title:
        ax.set_title(title)
    with plt.rc_context({"svg.hashsalt": "tropwall"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
