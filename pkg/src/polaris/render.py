"""Deterministic SVG rendering of chambers, developed tilings and
unfolded billiard trajectories.

Flat pictures are drawn in the plane, spherical ones by orthographic
projection of the upper hemisphere, hyperbolic ones in the Poincare disk.
Output is plain SVG 1.1 built from fixed-precision numbers, so a given
input always produces identical bytes.
"""

from __future__ import annotations

import math

import numpy as np

from . import geometry as geo
from .coxeter import Development, Realization, realize_chamber
from .polar_data import PolarData

SAMPLES_PER_EDGE = 24


def _project(model, pts):
    """Project model points to the drawing plane; returns (xy, visible)."""
    pts = np.atleast_2d(pts)
    if model == geo.EUCLIDEAN:
        return pts[:, :2], np.ones(len(pts), dtype=bool)
    if model == geo.SPHERICAL:
        return pts[:, :2], pts[:, 2] >= -1e-9
    denom = 1.0 + pts[:, 2]
    return pts[:, :2] / denom[:, None], np.ones(len(pts), dtype=bool)


def _edge_points(model, a, b, n=SAMPLES_PER_EDGE):
    d = float(geo.distance(model, a, b))
    if d < 1e-12:
        return np.array([a, b])
    u = geo.direction(model, a, b)
    ts = np.linspace(0.0, d, n)
    return geo.normalize_point(model, geo.geodesic(model, a, u, ts[:, None][:, 0]))


def _fmt(x):
    return f"{x:.6f}"


class SvgCanvas:
    def __init__(self):
        self.elements = []
        self.min_x = self.min_y = math.inf
        self.max_x = self.max_y = -math.inf

    def _track(self, xs, ys):
        if len(xs):
            self.min_x = min(self.min_x, float(np.min(xs)))
            self.max_x = max(self.max_x, float(np.max(xs)))
            self.min_y = min(self.min_y, float(np.min(ys)))
            self.max_y = max(self.max_y, float(np.max(ys)))

    def polyline(self, xy, stroke="#333333", width=0.01, opacity=1.0):
        if len(xy) < 2:
            return
        self._track(xy[:, 0], xy[:, 1])
        pts = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in xy)
        self.elements.append(
            f'<polyline fill="none" stroke="{stroke}" stroke-width="{_fmt(width)}" '
            f'stroke-opacity="{_fmt(opacity)}" points="{pts}" />'
        )

    def circle(self, cx, cy, r, stroke="#999999", width=0.01):
        self._track(np.array([cx - r, cx + r]), np.array([cy - r, cy + r]))
        self.elements.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(-cy)}" r="{_fmt(r)}" fill="none" '
            f'stroke="{stroke}" stroke-width="{_fmt(width)}" />'
        )

    def dot(self, x, y, r=0.02, fill="#c02020"):
        self._track(np.array([x]), np.array([y]))
        self.elements.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(-y)}" r="{_fmt(r)}" fill="{fill}" />'
        )

    def text(self, x, y, s, size=0.08):
        self._track(np.array([x]), np.array([y]))
        self.elements.append(
            f'<text x="{_fmt(x)}" y="{_fmt(-y)}" font-size="{_fmt(size)}" '
            f'font-family="sans-serif" fill="#222222">{s}</text>'
        )

    def to_svg(self):
        if not self.elements:
            self.min_x = self.min_y = -1.0
            self.max_x = self.max_y = 1.0
        pad = 0.1 * max(self.max_x - self.min_x, self.max_y - self.min_y, 0.1)
        x0, y0 = self.min_x - pad, -(self.max_y + pad)
        w, h = (self.max_x - self.min_x) + 2 * pad, (self.max_y - self.min_y) + 2 * pad
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}" '
            'width="640" height="640">\n'
        )
        return head + "\n".join(self.elements) + "\n</svg>\n"


def _draw_chamber_outline(canvas, r: Realization, labels=True, marks=None):
    model = r.model
    if r.dimension == 1:
        a, b = r.vertices[0], r.vertices[1]
        pts = _edge_points(model, a, b)
        xy, vis = _project(model, pts)
        canvas.polyline(xy[vis], stroke="#111111", width=0.02)
        for v, name in zip((a, b), ("minus", "plus")):
            p, _ = _project(model, v[None, :])
            canvas.dot(p[0, 0], p[0, 1])
            if labels:
                text = name if marks is None else f"{name}: {marks.get(name, '')}"
                canvas.text(p[0, 0] + 0.03, p[0, 1] + 0.03, text)
        return
    for w in r.walls:
        b = r.vertices[w.vertex_to]
        pts = _edge_points(model, w.a, b)
        xy, vis = _project(model, pts)
        canvas.polyline(xy[vis], stroke="#111111", width=0.02)
        if labels:
            mid = geo.normalize_point(model, geo.geodesic(model, w.a, w.u, np.array(w.length / 2)))
            p, ok = _project(model, mid[None, :])
            if ok[0]:
                text = w.side_id if marks is None else f"{w.side_id}: {marks.get(w.side_id, '')}"
                canvas.text(p[0, 0] + 0.02, p[0, 1] + 0.02, text, size=0.06)


def _mark_strings(data: PolarData):
    out = {}
    for k, v in data.graph.face_marks.items():
        out[k] = _short_group(v)
    return out


def _short_group(g):
    from .groups import NamedGroup, TorusSubgroup

    if isinstance(g, NamedGroup):
        return g.name
    if isinstance(g, TorusSubgroup):
        if g.rank == 0:
            return "1"
        if g.rank == 1:
            return "S1_" + ",".join(map(str, g.slope()))
        return f"T^{g.rank}"
    return str(g)


def render_chamber(data: PolarData) -> str:
    """Chamber outline with side labels and face marks."""
    r = realize_chamber(data.chamber)
    canvas = SvgCanvas()
    if r.model == geo.HYPERBOLIC:
        canvas.circle(0.0, 0.0, 1.0)
    if r.model == geo.SPHERICAL:
        canvas.circle(0.0, 0.0, 1.0)
    _draw_chamber_outline(canvas, r, labels=True, marks=_mark_strings(data))
    return canvas.to_svg()


def render_development(dev: Development, max_tiles=None) -> str:
    """The developed tiling: every stored element applied to the chamber
    edges, projected to the plane or disk."""
    r = dev.realization
    model = r.model
    canvas = SvgCanvas()
    if model in (geo.HYPERBOLIC, geo.SPHERICAL):
        canvas.circle(0.0, 0.0, 1.0)
    elements = dev.elements if max_tiles is None else dev.elements[:max_tiles]
    for _, m in elements:
        for w in r.walls:
            b = r.vertices[w.vertex_to]
            pts = _edge_points(model, w.a, b)
            moved = pts @ m.T
            if model != geo.EUCLIDEAN:
                moved = geo.normalize_point(model, moved)
            xy, vis = _project(model, moved)
            # break the polyline at invisible samples (far hemisphere)
            runs = np.split(np.arange(len(xy)), np.nonzero(~vis)[0])
            for run in runs:
                run = run[vis[run]] if len(run) else run
                if len(run) >= 2:
                    canvas.polyline(xy[run], stroke="#3355aa", width=0.008, opacity=0.8)
    _draw_chamber_outline(canvas, r, labels=False)
    return canvas.to_svg()


def render_billiard(config, result) -> str:
    """Unfolded trajectories: straight geodesics from p to the reflected
    copies of q, over a lightly drawn tiling of the reachable region."""
    from .billiard import _collect_tiles

    r = config.realization
    model = r.model
    canvas = SvgCanvas()
    if model in (geo.HYPERBOLIC, geo.SPHERICAL):
        canvas.circle(0.0, 0.0, 1.0)
    if r.dimension == 1:
        _draw_chamber_outline(canvas, r, labels=True)
        return canvas.to_svg()
    if model == geo.SPHERICAL:
        tiles = None
    else:
        G, _ = _collect_tiles(config, min(config.l_max, 12.0))
        tiles = G
    if tiles is not None:
        for m in tiles:
            for w in r.walls:
                b = r.vertices[w.vertex_to]
                pts = _edge_points(model, w.a, b, n=8)
                moved = pts @ m.T
                if model != geo.EUCLIDEAN:
                    moved = geo.normalize_point(model, moved)
                xy, vis = _project(model, moved)
                if vis.all():
                    canvas.polyline(xy, stroke="#bbbbbb", width=0.006, opacity=0.6)
    # trajectories as unfolded geodesics from p
    p = config.p_point
    e1, e2 = config.p_frame
    for t in result.trajectories:
        if t.length <= 0:
            continue
        # reconstruct the unfolded endpoint from the word
        m = np.eye(3)
        for s in t.word:
            m = m @ r.wall_by_side(s).reflection
        y = m @ config.q_point
        pts = _edge_points(model, p, geo.normalize_point(model, y), n=32)
        xy, vis = _project(model, pts)
        runs = np.split(np.arange(len(xy)), np.nonzero(~vis)[0])
        for run in runs:
            run = run[vis[run]] if len(run) else run
            if len(run) >= 2:
                canvas.polyline(xy[run], stroke="#c02020", width=0.01, opacity=0.85)
    pxy, _ = _project(model, p[None, :])
    canvas.dot(pxy[0, 0], pxy[0, 1], r=0.025, fill="#202020")
    _draw_chamber_outline(canvas, r, labels=False)
    return canvas.to_svg()


def save_svg(text, path):
    with open(path, "w") as fh:
        fh.write(text)
