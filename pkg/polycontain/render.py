"""
SVG figures of planar polytopes.

Each set is drawn as a filled boundary polygon, later sets on top. Output
bytes depend only on the inputs: the SVG hash salt is fixed and the date
metadata is dropped.
"""

import logging
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Polygon

from polycontain.approximate import PROJECTION, AlternationTrace
from polycontain.errors import InvalidInputError, UnsupportedConversionError
from polycontain.geometry import (AHPolytope, HPolytope, Set, Zonotope, order_polygon, to_hpolytope,
                                  vertices_2d)
from polycontain.oracle import hpolytope_vertices_smalldim

_log = logging.getLogger(__name__)

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


@dataclass
class Style:
    alpha: float = 0.35
    linewidth: float = 1.5
    edgecolor: str = "black"
    colors: Sequence[str] = COLORS
    width: float = 5.0
    height: float = 5.0
    margin: float = 0.1
    labels: Optional[Sequence[str]] = None


def polygon_2d(s: Set) -> np.ndarray:
    """Counterclockwise boundary of a planar set

    Zonotopes use their sign-pattern hull; other sets go through H-form and
    small-dimensional vertex enumeration, falling back to support sampling.
    """
    if s.dim != 2:
        raise InvalidInputError(f"can only render 2-D sets, got dimension {s.dim}")
    if isinstance(s, Zonotope):
        return vertices_2d(s)
    if isinstance(s, AHPolytope) and s.is_point:
        return s.center.reshape(1, 2)
    try:
        P = to_hpolytope(s)
    except UnsupportedConversionError:
        return vertices_2d(s)
    pts = hpolytope_vertices_smalldim(P)
    if pts.shape[0] == 0:
        _log.warning("nothing to draw for %r", s)
        return pts
    return order_polygon(pts)


def _limits(polygons: List[np.ndarray], margin: float):
    pts = np.vstack([p for p in polygons if p.size]) if any(p.size for p in polygons) else np.zeros((0, 2))
    if pts.shape[0] == 0:
        return (-1.0, 1.0), (-1.0, 1.0)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = margin * max(float(np.max(hi - lo)), 1e-6)
    return (lo[0] - pad, hi[0] + pad), (lo[1] - pad, hi[1] + pad)


def render_2d(sets: Sequence[Set], out_path: str, style: Optional[Style] = None) -> str:
    """Write an SVG with every set layered in order; returns ``out_path``"""
    style = style or Style()
    polygons = [polygon_2d(s) for s in sets]
    fig = Figure(figsize=(style.width, style.height))
    ax = fig.add_subplot(1, 1, 1)
    with matplotlib.rc_context({"svg.hashsalt": "polycontain"}):
        for k, pts in enumerate(polygons):
            color = style.colors[k % len(style.colors)]
            label = style.labels[k] if style.labels and k < len(style.labels) else None
            if pts.shape[0] >= 3:
                ax.add_patch(Polygon(pts, closed=True, facecolor=color, alpha=style.alpha,
                                     edgecolor=style.edgecolor, linewidth=style.linewidth, label=label))
            elif pts.shape[0]:
                ax.plot(pts[:, 0], pts[:, 1], marker="o", color=color, linewidth=style.linewidth, label=label)
        xlim, ylim = _limits(polygons, style.margin)
        ax.set_xlim(*xlim)
        ax.set_ylim(*ylim)
        ax.set_aspect("equal")
        if style.labels:
            ax.legend(loc="upper right")
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    _log.info("wrote %s (%d sets)", out_path, len(sets))
    return out_path


def render_trace(trace: AlternationTrace, original: Set, out_dir: str, style: Optional[Style] = None) -> List[str]:
    """One SVG per accepted iterate: the original set under the iterate's set"""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for k, (matrix, bound) in enumerate(trace.iterates):
        current = _iterate_set(trace, matrix)
        path = os.path.join(out_dir, f"{trace.kind}_{k:03d}.svg")
        frame_style = style or Style(labels=["original", f"iterate {k} (bound {bound:.4g})"])
        paths.append(render_2d([original, current], path, frame_style))
    return paths


def _iterate_set(trace: AlternationTrace, matrix: np.ndarray) -> Set:
    center = np.zeros(matrix.shape[0]) if trace.center is None else trace.center
    if trace.kind == PROJECTION:
        return AHPolytope(center, np.eye(matrix.shape[1]), HPolytope(matrix, np.ones(matrix.shape[0])))
    return Zonotope(center, matrix)
