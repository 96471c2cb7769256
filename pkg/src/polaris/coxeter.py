"""Coxeter matrix, geometric realization of chambers, and the development
of the reflection tiling in the model space.

A realized chamber knows its vertices, its walls (each with an inward
covector, the wall reflection, and arc-length bookkeeping along the side)
and an interior anchor point.  ``develop`` closes the wall reflections
under multiplication: spherical chambers close up to a finite group whose
tiles cover the sphere, while flat and hyperbolic chambers are certified
infinite by the exact two-dimensional criterion (a 2D reflection group of
this kind is finite exactly when the chamber is spherical), avoiding
enumeration timeouts entirely.

Section invariants combine the exact Gauss-Bonnet account of the chamber
with the declared polar group order: chi(Sigma) = |Pi| kappa A / 2 pi,
all in exact rational arithmetic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from . import geometry as geo
from .polar_data import Chamber, ChamberGeometry, DataError, PolarData, chamber_geometry

REALIZE_TOL = 1e-9


class CoxeterError(ValueError):
    pass


class RealizationError(CoxeterError):
    pass


class DevelopBudgetError(CoxeterError):
    pass


# -- Coxeter matrix -------------------------------------------------------------


@dataclass(frozen=True)
class CoxeterMatrix:
    """Orders m_ij of the products of wall reflections; None encodes
    infinity (faces sharing no corner)."""

    side_ids: tuple
    entries: tuple  # tuple of tuples, diagonal 1, None = infinity

    @property
    def size(self):
        return len(self.side_ids)

    def order(self, i, j):
        return self.entries[i][j]

    def is_spherical_type(self):
        """Finite in 2D exactly when every entry is finite and the chamber
        angle sum is spherical; callers pass the chamber curvature."""
        return all(e is not None for row in self.entries for e in row)


def coxeter_matrix(data: PolarData) -> CoxeterMatrix:
    """Corner angle orders arranged as a symmetric matrix over the sides."""
    chamber = data.chamber
    if chamber.dimension == 1:
        ids = ("minus", "plus")
        return CoxeterMatrix(ids, ((1, None), (None, 1)))
    ids = tuple(s.id for s in chamber.sides)
    k = len(ids)
    entries = [[None] * k for _ in range(k)]
    for i in range(k):
        entries[i][i] = 1
    for idx, corner in enumerate(chamber.corners):
        i = (idx - 1) % k
        j = idx
        if i == j:
            continue
        m = corner.order
        prev = entries[i][j]
        # a biangle's two corners share the same side pair
        if prev is not None and prev != 1 and prev != m:
            raise DataError(
                f"sides {ids[i]!r}, {ids[j]!r} meet at corners of different orders {prev}, {m}"
            )
        entries[i][j] = entries[j][i] = m
    return CoxeterMatrix(ids, tuple(tuple(row) for row in entries))


# -- realized chambers -----------------------------------------------------------


@dataclass
class Wall:
    """One reflecting side of a realized chamber.

    ``a`` is the starting vertex, ``u`` the unit tangent along the side,
    ``length`` its arc length; ``covector`` is normalized inward (positive
    on the chamber interior) and ``reflection`` is the wall reflection.
    """

    side_id: str
    a: np.ndarray
    u: np.ndarray
    length: float
    covector: np.ndarray
    reflection: np.ndarray
    vertex_from: int
    vertex_to: int

    def arc_position(self, model, z):
        """Arc-length position of a point z lying on the wall's geodesic."""
        t = geo.foot_parameter(model, self.a, self.u, z)
        if model == geo.SPHERICAL:
            t %= 2 * math.pi
        return t

    def corner_clearance(self, model, z):
        """Distance from a wall point to the nearest end of the side; negative
        when the point lies beyond the side segment."""
        t = self.arc_position(model, z)
        return min(t, self.length - t)


@dataclass
class Realization:
    model: str
    dimension: int
    vertices: np.ndarray
    walls: list
    anchor: np.ndarray
    frame: tuple
    chamber: Chamber
    kappa: int

    def wall_by_side(self, side_id):
        for w in self.walls:
            if w.side_id == side_id:
                return w
        raise KeyError(side_id)

    def contains(self, point, margin=0.0):
        return all(float(np.dot(point, w.covector)) >= margin for w in self.walls)

    def point(self, xy):
        """Model point for planar coordinates.

        Flat chambers use the Cartesian coordinates of the realization
        itself (the polygon is walked from the origin along the x-axis);
        curved chambers use the exponential chart at the anchor.
        """
        if self.model == geo.EUCLIDEAN:
            return np.array([float(xy[0]), float(xy[1]), 1.0])
        return geo.from_chart(self.model, self.anchor, self.frame, xy)

    def side_lengths(self):
        return {w.side_id: w.length for w in self.walls}


def _triangle_lengths_from_angles(kappa, alphas):
    """Side lengths of the constant-curvature triangle with the given
    angles; side i joins vertices i and i+1, opposite the corner i+2."""
    a0, a1, a2 = alphas
    out = []
    for i in range(3):
        opp = alphas[(i + 2) % 3]
        b, c = alphas[i], alphas[(i + 1) % 3]
        num = math.cos(opp) + math.cos(b) * math.cos(c)
        den = math.sin(b) * math.sin(c)
        if kappa == 1:
            out.append(math.acos(min(1.0, max(-1.0, num / den))))
        else:
            out.append(math.acosh(max(1.0, num / den)))
    return out


def _flat_triangle_lengths(alphas, user_lengths):
    # similarity class fixed by the angles; scale from the first user length
    sines = [math.sin(alphas[(i + 2) % 3]) for i in range(3)]
    ratios = [ul / s for ul, s in zip(user_lengths, sines)]
    if max(ratios) - min(ratios) < 1e-9 * max(ratios):
        return list(user_lengths)
    scale = user_lengths[0] / sines[0]
    lengths = [scale * s for s in sines]
    warnings.warn(
        "flat triangle side lengths inconsistent with the angles; rescaled "
        f"to {lengths} (law of sines)"
    )
    return lengths


def _cyclic_polygon_lengths(alphas):
    """Side lengths of the circumscribed hyperbolic polygon with the given
    angles (the canonical symmetric realization for k >= 4)."""
    k = len(alphas)
    # base angles b_i of the isoceles central triangles: b_{i-1} + b_i = alpha_i
    m = np.zeros((k, k))
    for i in range(k):
        m[i, (i - 1) % k] = 1.0
        m[i, i] = 1.0
    rhs = np.array(alphas, dtype=float)
    if k % 2 == 1:
        b = np.linalg.solve(m, rhs)
    else:
        # singular cyclic system: solvable iff the alternating sum vanishes
        alt = sum((-1) ** i * a for i, a in enumerate(alphas))
        if abs(alt) > 1e-12:
            raise RealizationError(
                "no circumscribed realization: alternating angle sum "
                f"{alt:.3g} != 0 for an even-sided polygon"
            )
        part = np.zeros(k)
        for i in range(1, k):
            part[i] = rhs[i] - part[i - 1]
        # family part + s * (-1)^i; centre s in the feasible interval
        lo, hi = -math.inf, math.inf
        for i in range(k):
            sgn = (-1) ** i
            # 0 < part_i + sgn * s < pi/2
            if sgn > 0:
                lo = max(lo, -part[i])
                hi = min(hi, math.pi / 2 - part[i])
            else:
                lo = max(lo, part[i] - math.pi / 2)
                hi = min(hi, part[i])
        if not lo < hi:
            raise RealizationError("no circumscribed realization: empty base-angle interval")
        s = (lo + hi) / 2
        b = part + np.array([(-1) ** i * s for i in range(k)])
    if np.any(b <= 0) or np.any(b >= math.pi / 2):
        raise RealizationError("no circumscribed realization: base angles out of range")

    def angle_sum(r):
        # central angles psi_i from cot(b) = cosh(r) tan(psi/2)
        ch = math.cosh(r)
        return sum(2 * math.atan(1.0 / (math.tan(bi) * ch)) for bi in b) - 2 * math.pi

    r = brentq(angle_sum, 1e-9, 50.0, xtol=1e-14, rtol=1e-15)
    ch, sh = math.cosh(r), math.sinh(r)
    lengths = []
    for bi in b:
        psi = 2 * math.atan(1.0 / (math.tan(bi) * ch))
        lengths.append(2 * math.asinh(sh * math.sin(psi / 2)))
    return lengths


def _walk_polygon(model, lengths, alphas):
    """Vertices and side start-directions of the polygon walked from the
    base point, interior on the left; returns (vertices, dirs, defect)."""
    k = len(lengths)
    x = geo.base_point(model)
    e1, _ = geo.tangent_frame(model, x)
    d = e1
    vertices = [x]
    dirs = []
    for i in range(k):
        dirs.append(d)
        nxt = geo.geodesic(model, x, d, np.array(lengths[i]))
        nxt = geo.normalize_point(model, nxt)
        gt = geo.geodesic_tangent(model, x, d, np.array(lengths[i]))
        turn = math.pi - alphas[(i + 1) % k]
        d = math.cos(turn) * gt + math.sin(turn) * geo._rotate90(model, nxt, gt)
        x = nxt
        vertices.append(x)
    defect = float(geo.distance(model, vertices[0], vertices[-1]))
    return np.array(vertices[:-1]), dirs, defect


def realize_chamber(chamber: Chamber) -> Realization:
    """Geometric realization of a chamber in its constant-curvature model.

    Triangles with curvature are rigid, so their side lengths are computed
    from the angles (stored lengths are ignored, with a warning when they
    disagree).  Flat chambers use the stored lengths; polygons with moduli
    (k >= 4, curvature -1) get the canonical circumscribed realization
    unless the stored lengths already close the polygon.
    """
    geom = chamber_geometry(chamber)
    if chamber.dimension == 1:
        return _realize_interval(chamber, geom)
    model = geo.model_for_curvature(geom.kappa)
    k = chamber.k
    alphas = [math.pi / c.order for c in chamber.corners]
    user = [s.length for s in chamber.sides]

    if k == 2:
        if chamber.corners[0].order != chamber.corners[1].order:
            raise RealizationError("a spherical biangle has equal corner angles")
        lengths = [math.pi, math.pi]
    elif k == 3 and geom.kappa != 0:
        lengths = _triangle_lengths_from_angles(geom.kappa, alphas)
        if any(abs(l - ul) > 1e-6 * max(1.0, ul) for l, ul in zip(lengths, user)) and any(
            abs(ul - 1.0) > 1e-12 for ul in user
        ):
            warnings.warn(
                f"triangle angles determine the side lengths {lengths}; "
                "stored lengths ignored"
            )
    elif geom.kappa == 0:
        if k == 3:
            lengths = _flat_triangle_lengths(alphas, user)
        else:
            # flat polygons with all orders in {2,3,4,6} are rectangles
            if abs(user[0] - user[2]) > 1e-9 or abs(user[1] - user[3]) > 1e-9:
                raise RealizationError(
                    "flat right-angled quadrilateral needs equal opposite sides; "
                    f"got {user} (closure identity l_0 = l_2, l_1 = l_3 violated)"
                )
            lengths = user
    else:
        # hyperbolic, k >= 4: stored lengths if they close, else canonical
        _, _, defect = _walk_polygon(model, user, alphas)
        if defect < 1e-7:
            lengths = user
        else:
            lengths = _cyclic_polygon_lengths(alphas)

    vertices, dirs, defect = _walk_polygon(model, lengths, alphas)
    if defect > 1e-6:
        raise RealizationError(
            f"polygon does not close (defect {defect:.3g}); lengths {lengths} "
            "violate the polygon closure identity for the prescribed angles"
        )
    return _finish_realization(model, chamber, geom, vertices, dirs, lengths)


def _finish_realization(model, chamber, geom, vertices, dirs, lengths):
    k = len(vertices)
    mids = []
    walls = []
    for i in range(k):
        a = vertices[i]
        u = dirs[i]
        mid = geo.normalize_point(model, geo.geodesic(model, a, u, np.array(lengths[i] / 2)))
        mids.append(mid)
        walls.append((a, u, mid, i, (i + 1) % k))
    center = np.mean(np.vstack([vertices, np.array(mids)]), axis=0)
    anchor = geo.normalize_point(model, center)
    out = []
    for (a, u, mid, i, j), side in zip(walls, chamber.sides):
        w = geo.wall_covector(model, a, mid)
        if float(np.dot(anchor, w)) < 0:
            w = -w
        refl = geo.reflection_matrix(model, a, mid)
        out.append(
            Wall(
                side_id=side.id,
                a=a,
                u=u,
                length=lengths[i],
                covector=w,
                reflection=refl,
                vertex_from=i,
                vertex_to=j,
            )
        )
    realization = Realization(
        model=model,
        dimension=2,
        vertices=vertices,
        walls=out,
        anchor=anchor,
        frame=geo.tangent_frame(model, anchor),
        chamber=chamber,
        kappa=geom.kappa,
    )
    _check_realization(realization)
    return realization


def _check_realization(r: Realization):
    if not r.contains(r.anchor, margin=1e-12):
        raise RealizationError("anchor fell outside the realized chamber")
    chamber = r.chamber
    k = chamber.k
    for idx, corner in enumerate(chamber.corners):
        v = r.vertices[idx]
        w_in = r.walls[(idx - 1) % k]
        w_out = r.walls[idx]
        t_in = geo.geodesic_tangent(r.model, w_in.a, w_in.u, np.array(w_in.length))
        ang = geo.angle_between(r.model, v, -t_in, w_out.u)
        if abs(ang - math.pi / corner.order) > 1e-6:
            raise RealizationError(
                f"realized angle {ang:.6f} at corner {corner.id!r} differs from "
                f"pi/{corner.order} (trigonometric identity violated)"
            )


def _realize_interval(chamber: Chamber, geom: ChamberGeometry) -> Realization:
    model = geo.model_for_curvature(geom.kappa)
    length = float(chamber.length)
    x = geo.base_point(model)
    e1, e2 = geo.tangent_frame(model, x)
    v0 = x
    v1 = geo.normalize_point(model, geo.geodesic(model, x, e1, np.array(length)))
    vertices = np.array([v0, v1])
    walls = []
    for side_id, v in zip(("minus", "plus"), (v0, v1)):
        # the reflecting "wall" is the orthogonal geodesic at the endpoint
        axis_t = e1 if side_id == "minus" else geo.geodesic_tangent(model, x, e1, np.array(length))
        ortho = geo._rotate90(model, v, axis_t)
        other = geo.normalize_point(model, geo.geodesic(model, v, ortho, np.array(0.5)))
        w = geo.wall_covector(model, v, other)
        mid = geo.normalize_point(model, geo.geodesic(model, x, e1, np.array(length / 2)))
        if float(np.dot(mid, w)) < 0:
            w = -w
        walls.append(
            Wall(
                side_id=side_id,
                a=v,
                u=ortho,
                length=0.0,
                covector=w,
                reflection=geo.reflection_matrix(model, v, other),
                vertex_from=0 if side_id == "minus" else 1,
                vertex_to=0 if side_id == "minus" else 1,
            )
        )
    anchor = geo.normalize_point(model, geo.geodesic(model, x, e1, np.array(length / 2)))
    return Realization(
        model=model,
        dimension=1,
        vertices=vertices,
        walls=walls,
        anchor=anchor,
        frame=(e1, e2),
        chamber=chamber,
        kappa=geom.kappa,
    )


# -- development ------------------------------------------------------------------


CLOSED_FINITE = "closed-finite"
BUDGET_EXHAUSTED = "budget-exhausted"
INFINITE_CERTIFIED = "infinite-certified"


@dataclass
class Development:
    realization: Realization
    elements: list  # [(word, matrix)] in shortlex order
    status: str
    tolerance: float

    @property
    def order(self):
        return len(self.elements) if self.status == CLOSED_FINITE else None

    def matrices(self):
        return [m for _, m in self.elements]

    def words(self):
        return [w for w, _ in self.elements]

    def group_closure_defect(self):
        """Max over stored g and generators r of the distance from g r to
        the element set (0 for a genuinely closed finite group)."""
        if self.status != CLOSED_FINITE:
            return None
        index = geo.QuantizedIndex(cell=self.tolerance / 4, tol=self.tolerance)
        for _, m in self.elements:
            index.insert(m.ravel())
        worst = 0.0
        gens = [w.reflection for w in self.realization.walls]
        for _, m in self.elements:
            for r in gens:
                prod = m @ r
                _, created = index.insert(prod.ravel())
                if created:
                    return math.inf
        return worst


def develop(
    data_or_chamber,
    max_elems: int = 20000,
    tolerance: float = 1e-7,
    force_enumerate: bool = False,
) -> Development:
    """Close the chamber's wall reflections under multiplication.

    Spherical chambers enumerate to a finite group (raising
    DevelopBudgetError if the budget is hit, which indicates a bad
    realization or too coarse a tolerance).  Flat and hyperbolic chambers
    are certified infinite without enumeration unless ``force_enumerate``
    is set, in which case the enumeration stops at the budget with status
    'budget-exhausted'.

    Words are reported in shortlex order; the word (i1, ..., ib) denotes
    the product r_{i1} ... r_{ib} of wall reflections, so the tile of a
    word is adjacent to the tile of its parent across the wall named last.
    """
    chamber = data_or_chamber.chamber if isinstance(data_or_chamber, PolarData) else data_or_chamber
    realization = realize_chamber(chamber)
    finite_type = realization.kappa == 1
    identity = np.eye(3)
    if not finite_type and not force_enumerate:
        return Development(realization, [((), identity)], INFINITE_CERTIFIED, tolerance)

    gens = [(i, w.reflection) for i, w in enumerate(realization.walls)]
    index = geo.QuantizedIndex(cell=tolerance / 4, tol=tolerance)
    index.insert(identity.ravel())
    elements = [((), identity)]
    frontier = [((), identity)]
    status = CLOSED_FINITE
    while frontier:
        new_frontier = []
        for word, m in frontier:
            for i, r in gens:
                if word and word[-1] == i:
                    continue  # r_i r_i = 1
                prod = m @ r
                _, created = index.insert(prod.ravel())
                if created:
                    entry = (word + (i,), prod)
                    elements.append(entry)
                    new_frontier.append(entry)
                    if len(elements) > max_elems:
                        if finite_type:
                            raise DevelopBudgetError(
                                f"budget of {max_elems} exhausted on a spherical chamber: "
                                "tolerance too coarse or realization inconsistent"
                            )
                        return Development(realization, elements, BUDGET_EXHAUSTED, tolerance)
        new_frontier.sort(key=lambda e: e[0])
        frontier = new_frontier
    return Development(realization, elements, status, tolerance)


def tile_cover_defect(dev: Development) -> float:
    """|N * Area(C) - 4 pi| for a closed spherical development."""
    if dev.status != CLOSED_FINITE or dev.realization.kappa != 1:
        raise CoxeterError("tile cover checks apply to closed spherical developments")
    geom = chamber_geometry(dev.realization.chamber)
    if dev.realization.dimension == 1:
        total = len(dev.elements) * dev.realization.chamber.length
        return abs(total - 2 * math.pi)
    area = float(geom.area_over_pi) * math.pi
    return abs(len(dev.elements) * area - 4 * math.pi)


# -- section invariants -------------------------------------------------------------


@dataclass
class SectionInvariants:
    kappa: int
    area_over_pi: Fraction | None
    pi_order: int
    chi: int | None
    genus: int | None
    surface: str
    total_area_over_pi: Fraction | None
    problems: list = field(default_factory=list)

    @property
    def consistent(self):
        return not self.problems


def section_invariants(data: PolarData, flat_area: float | None = None) -> SectionInvariants:
    """Euler characteristic and genus of the section from the chamber area
    and the declared polar group order (exact rational arithmetic)."""
    if data.declared_pi is None or data.declared_pi.order is None:
        raise CoxeterError("section non-compact or polar group undeclared: invariants undefined")
    n = data.declared_pi.order
    orientable = data.declared_pi.orientable
    if data.chamber.dimension == 1:
        return SectionInvariants(
            kappa=data.chamber.curvature or 0,
            area_over_pi=None,
            pi_order=n,
            chi=0,
            genus=None,
            surface="S^1",
            total_area_over_pi=None,
        )
    geom = chamber_geometry(data.chamber)
    problems = []
    if geom.kappa == 0:
        chi = 0
        area = None
        total = None
    else:
        area = geom.area_over_pi
        total = n * area
        chi2 = geom.kappa * total  # 2 chi
        if chi2.denominator != 1 or chi2 % 2 != 0:
            problems.append(f"|Pi| kappa A / 2 pi = {chi2 / 2} is not an integer")
            chi = None
        else:
            chi = int(chi2 / 2)
            if geom.kappa == 1 and chi not in (1, 2):
                problems.append(f"spherical section has chi = {chi}, expected 1 (RP^2) or 2 (S^2)")
    genus = None
    if chi is not None and orientable and chi % 2 == 0:
        genus = (2 - chi) // 2
    surface = _surface_name(chi, orientable)
    return SectionInvariants(
        kappa=geom.kappa,
        area_over_pi=area,
        pi_order=n,
        chi=chi,
        genus=genus,
        surface=surface,
        total_area_over_pi=total,
        problems=problems,
    )


def _surface_name(chi, orientable):
    if chi is None:
        return "inconsistent"
    if chi == 2:
        return "S^2"
    if chi == 1:
        return "RP^2"
    if orientable is None:
        return f"surface with chi = {chi}"
    if orientable:
        if chi % 2:
            return "inconsistent (orientable surfaces have even chi)"
        g = (2 - chi) // 2
        return "T^2" if g == 1 else f"genus-{g} surface"
    return f"non-orientable surface with chi = {chi}"


# -- polar group vs development ------------------------------------------------------


@dataclass
class PiConsistencyReport:
    entries: list = field(default_factory=list)

    def add(self, passed, message):
        self.entries.append((passed, message))

    @property
    def consistent(self):
        return all(p for p, _ in self.entries)

    def __str__(self):
        return "\n".join(("ok " if p else "FAIL ") + m for p, m in self.entries)


def pi_consistency(data: PolarData, dev: Development) -> PiConsistencyReport:
    """Compare the declared polar group order against the development.

    A finite reflection development bounds |Pi| from above: the polar
    group is a quotient of the chamber's abstract reflection group, so
    |Pi| must divide its order; equality means the section equals the
    universal section.  For infinite developments only the Gauss-Bonnet
    account can be checked.
    """
    report = PiConsistencyReport()
    if data.declared_pi is None or data.declared_pi.order is None:
        report.add(True, "no finite polar group declared; nothing to check")
        return report
    n = data.declared_pi.order
    if dev.status == CLOSED_FINITE:
        order = dev.order
        if n > order:
            report.add(False, f"|Pi| = {n} exceeds the reflection group order {order}")
            return report
        if order % n != 0:
            report.add(False, f"|Pi| = {n} does not divide the reflection group order {order}")
        elif n == order:
            report.add(True, f"|Pi| = {order}: the section is unique (Sigma = Sigma')")
        else:
            report.add(True, f"Sigma = Sigma'/(index {order // n}) with |Pi| = {n} of {order}")
    else:
        report.add(
            True,
            "reflection group infinite: universal-section comparison unavailable, "
            "accepting the declared order via the Gauss-Bonnet account",
        )
    inv = section_invariants(data) if data.chamber.dimension == 2 else None
    if inv is not None:
        for p in inv.problems:
            report.add(False, p)
        if inv.consistent and inv.chi is not None:
            report.add(True, f"chi(Sigma) = {inv.chi} ({inv.surface})")
        elif inv.consistent:
            report.add(True, "flat section: chi = 0")
    return report
