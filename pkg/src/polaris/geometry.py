"""Constant-curvature model geometry with a uniform 3x3 matrix calculus.

Points live in R^3 in all three models:

* ``spherical``    unit vectors on S^2, isometries orthogonal matrices;
* ``euclidean``    homogeneous coordinates (x, y, 1), isometries affine
  matrices with orthogonal linear part;
* ``hyperbolic``   the upper sheet of x^2 + y^2 - z^2 = -1, isometries
  orthochronous Lorentz matrices.

Reflections are linear in every model, so composing isometries is always
a matrix product.  Walls (reflecting geodesics) are stored as covectors
``w`` normalized so that membership is the sign of a plain dot product;
this makes the crossing computations identical in shape across models.

Most functions broadcast over a leading batch axis.
"""

from __future__ import annotations

import math

import numpy as np

SPHERICAL = "spherical"
EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"

MODELS = (SPHERICAL, EUCLIDEAN, HYPERBOLIC)

J_LORENTZ = np.diag([1.0, 1.0, -1.0])


class GeometryError(ValueError):
    pass


def model_for_curvature(kappa):
    return {1: SPHERICAL, 0: EUCLIDEAN, -1: HYPERBOLIC}[kappa]


# -- points and tangents -------------------------------------------------------


def base_point(model):
    if model == EUCLIDEAN:
        return np.array([0.0, 0.0, 1.0])
    return np.array([0.0, 0.0, 1.0])  # north pole / hyperboloid apex


def normalize_point(model, x):
    x = np.asarray(x, dtype=float)
    if model == SPHERICAL:
        return x / np.linalg.norm(x, axis=-1, keepdims=True)
    if model == HYPERBOLIC:
        q = -mdot(x, x)
        return x / np.sqrt(np.maximum(q, 1e-300))[..., None]
    out = x.copy()
    out[..., :] = out / out[..., 2:3]
    return out


def mdot(x, y):
    """Minkowski inner product diag(1, 1, -1)."""
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2]


def tangent_dot(model, x, u, v):
    """Inner product of tangent vectors at the point x."""
    if model == HYPERBOLIC:
        return mdot(u, v)
    return np.sum(u * v, axis=-1)


def distance(model, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if model == SPHERICAL:
        return np.arccos(np.clip(np.sum(x * y, axis=-1), -1.0, 1.0))
    if model == HYPERBOLIC:
        return np.arccosh(np.maximum(-mdot(x, y), 1.0))
    return np.hypot(x[..., 0] - y[..., 0], x[..., 1] - y[..., 1])


def geodesic(model, x, u, t):
    """Unit-speed geodesic from x with initial tangent u, at time t."""
    t = np.asarray(t, dtype=float)[..., None]
    if model == SPHERICAL:
        return np.cos(t) * x + np.sin(t) * u
    if model == HYPERBOLIC:
        return np.cosh(t) * x + np.sinh(t) * u
    return x + t * u


def geodesic_tangent(model, x, u, t):
    """Tangent of the geodesic at time t (parallel along itself)."""
    t = np.asarray(t, dtype=float)[..., None]
    if model == SPHERICAL:
        return -np.sin(t) * x + np.cos(t) * u
    if model == HYPERBOLIC:
        return np.sinh(t) * x + np.cosh(t) * u
    return np.broadcast_to(u, np.broadcast_shapes(x.shape, u.shape)).copy()


def direction(model, x, y):
    """Unit tangent at x pointing toward y (undefined for equal points)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if model == SPHERICAL:
        c = np.sum(x * y, axis=-1)[..., None]
        u = y - c * x
        return u / np.maximum(np.linalg.norm(u, axis=-1, keepdims=True), 1e-300)
    if model == HYPERBOLIC:
        c = mdot(x, y)[..., None]
        u = y + c * x
        norm = np.sqrt(np.maximum(mdot(u, u), 1e-300))[..., None]
        return u / norm
    u = y - x
    u[..., 2] = 0.0
    return u / np.maximum(np.linalg.norm(u, axis=-1, keepdims=True), 1e-300)


def tangent_frame(model, x, toward=None):
    """An orthonormal tangent frame (e1, e2) at x; e1 points toward
    ``toward`` when given."""
    if toward is not None:
        e1 = direction(model, x, toward)
    elif model == EUCLIDEAN:
        e1 = np.array([1.0, 0.0, 0.0])
    else:
        e = np.array([1.0, 0.0, 0.0])
        if model == SPHERICAL:
            e1 = e - np.dot(e, x) * x
        else:
            e1 = e + mdot(e, x) * x  # <x, x>_J = -1
        e1 = e1 / math.sqrt(max(tangent_dot(model, x, e1, e1), 1e-300))
    e2 = _rotate90(model, x, e1)
    return e1, e2


def _rotate90(model, x, u):
    """Tangent vector orthogonal to u at x (rotation by +90 degrees)."""
    if model == EUCLIDEAN:
        return np.array([-u[1], u[0], 0.0])
    if model == SPHERICAL:
        return np.cross(x, u)
    # hyperbolic: Lorentz cross product J(x ^ u)
    v = np.cross(x, u)
    return J_LORENTZ @ v


def orthonormalize_tangent(model, x, u):
    """Project u back into the tangent space at x and rescale to unit
    length (numerical hygiene for long reflection cascades)."""
    if model == EUCLIDEAN:
        out = u.copy()
        out[..., 2] = 0.0
        norm = np.linalg.norm(out[..., :2], axis=-1)[..., None]
        return out / np.maximum(norm, 1e-300)
    if model == SPHERICAL:
        c = np.sum(x * u, axis=-1)[..., None]
        out = u - c * x
        return out / np.maximum(np.linalg.norm(out, axis=-1, keepdims=True), 1e-300)
    c = mdot(x, u)[..., None]
    out = u + c * x  # <x, x>_J = -1
    norm = np.sqrt(np.maximum(mdot(out, out), 1e-300))[..., None]
    return out / norm


def from_chart(model, anchor, frame, xy):
    """Exponential-chart point for planar coordinates (x, y) at anchor."""
    v = float(xy[0]) * frame[0] + float(xy[1]) * frame[1]
    r = math.sqrt(max(tangent_dot(model, anchor, v, v), 0.0))
    if r < 1e-15:
        return anchor.copy()
    return geodesic(model, anchor, v / r, r)


# -- walls ----------------------------------------------------------------------


def wall_covector(model, a, b):
    """Covector w with dot(x, w) = 0 exactly on the geodesic through a, b.

    Normalized so dot(x, w) is the sine (spherical), plain signed distance
    (euclidean) or hyperbolic sine (hyperbolic) of the distance to the wall.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if model == SPHERICAL:
        n = np.cross(a, b)
        nn = np.linalg.norm(n)
        if nn < 1e-14:
            raise GeometryError("wall through equal or antipodal points")
        return n / nn
    if model == HYPERBOLIC:
        n = J_LORENTZ @ np.cross(a, b)  # J-normal of span(a, b)
        q = mdot(n, n)
        if q <= 1e-14:
            raise GeometryError("degenerate hyperbolic wall")
        n = n / math.sqrt(q)
        return J_LORENTZ @ n  # covector: dot(x, w) = <x, n>_J
    d = b[:2] - a[:2]
    nn = np.linalg.norm(d)
    if nn < 1e-14:
        raise GeometryError("wall through equal points")
    nx, ny = -d[1] / nn, d[0] / nn
    c = -(nx * a[0] + ny * a[1])
    return np.array([nx, ny, c])


def reflection_matrix(model, a, b):
    """Isometry reflecting across the geodesic through a and b."""
    w = wall_covector(model, a, b)
    if model == SPHERICAL:
        return np.eye(3) - 2.0 * np.outer(w, w)
    if model == HYPERBOLIC:
        n = J_LORENTZ @ w  # unit spacelike normal
        return np.eye(3) - 2.0 * np.outer(n, w)
    n_vec = np.array([w[0], w[1], 0.0])
    return np.eye(3) - 2.0 * np.outer(n_vec, w)


def isometry_defect(model, m):
    """Max-norm failure of the defining matrix identity of the model."""
    m = np.asarray(m, dtype=float)
    if model == SPHERICAL:
        return float(np.abs(m.T @ m - np.eye(3)).max())
    if model == HYPERBOLIC:
        return float(np.abs(m.T @ J_LORENTZ @ m - J_LORENTZ).max())
    lin = m[:2, :2]
    err = float(np.abs(lin.T @ lin - np.eye(2)).max())
    return max(err, float(np.abs(m[2] - np.array([0.0, 0.0, 1.0])).max()))


def crossing_times(model, x, u, w, t_max):
    """All t in (0, t_max) where the geodesic from (x, u) crosses wall w.

    Scalar inputs only; returns a sorted list.
    """
    a = float(np.dot(x, w))
    b = float(np.dot(u, w))
    out = []
    if model == EUCLIDEAN:
        if abs(b) > 1e-15:
            t = -a / b
            if 0 < t < t_max:
                out.append(t)
        return out
    if model == HYPERBOLIC:
        # cosh t a + sinh t b = 0
        if abs(b) > abs(a):
            t = math.atanh(-a / b)
            if 0 < t < t_max:
                out.append(t)
        return out
    # spherical: crossings repeat with period pi
    t0 = math.atan2(-a, b) % math.pi
    t = t0
    while t < t_max:
        if t > 0:
            out.append(t)
        t += math.pi
    return out


def foot_parameter(model, a, u, p):
    """Parameter of the point closest to p along the geodesic (a, u).

    For the sphere this is defined modulo 2 pi; for the hyperbolic plane
    +-inf is clamped to a large value.
    """
    if model == EUCLIDEAN:
        return float(np.dot(p - a, u))
    if model == SPHERICAL:
        return math.atan2(float(np.dot(p, u)), float(np.dot(p, a)))
    ca = mdot(a, p)
    cu = mdot(u, p)
    if abs(cu) >= abs(ca):
        return math.copysign(50.0, -cu * ca)
    return math.atanh(-cu / ca)


def point_segment_distance(model, p, a, b):
    """Distance from p to the geodesic segment from a to b."""
    length = float(distance(model, a, b))
    if length < 1e-14:
        return float(distance(model, p, a))
    u = direction(model, a, b)
    t = foot_parameter(model, a, u, p)
    candidates = [0.0, length]
    if model == SPHERICAL:
        for tt in (t % (2 * math.pi), (t % (2 * math.pi)) - 2 * math.pi):
            if 0 <= tt <= length:
                candidates.append(tt)
    else:
        candidates.append(min(max(t, 0.0), length))
    best = min(float(distance(model, p, geodesic(model, a, u, tt))) for tt in candidates)
    return best


def angle_between(model, x, u, v):
    c = tangent_dot(model, x, u, v)
    c /= math.sqrt(max(tangent_dot(model, x, u, u) * tangent_dot(model, x, v, v), 1e-300))
    return math.acos(min(1.0, max(-1.0, c)))


# -- quantized deduplication -----------------------------------------------------


class QuantizedIndex:
    """Dictionary of real vectors up to a tolerance.

    Keys are grid-rounded coordinates; insertion probes the neighbouring
    cells of any coordinate close to a grid boundary, so two vectors
    within ``tol`` of each other always collide while vectors separated
    by more than ``4 * cell`` never do.
    """

    def __init__(self, cell=1e-5, tol=1e-9):
        self.cell = cell
        self.tol = tol
        self._table = {}
        self._items = []

    def __len__(self):
        return len(self._items)

    def _keys(self, vec):
        scaled = [x / self.cell for x in vec]
        base = [math.floor(s) for s in scaled]
        margins = [
            (0, -1) if s - b < 0.25 else ((0, 1) if s - b > 0.75 else (0,))
            for s, b in zip(scaled, base)
        ]
        def rec(i, acc):
            if i == len(base):
                yield tuple(acc)
                return
            for off in margins[i]:
                acc.append(base[i] + off)
                yield from rec(i + 1, acc)
                acc.pop()
        return rec(0, [])

    def insert(self, vec, payload=None):
        """Return (index, created)."""
        vec = tuple(float(x) for x in vec)
        for key in self._keys(vec):
            if key in self._table:
                return self._table[key], False
        idx = len(self._items)
        self._items.append(payload if payload is not None else vec)
        for key in self._keys(vec):
            self._table[key] = idx
        return idx, True

    def items(self):
        return list(self._items)
