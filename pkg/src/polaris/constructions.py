"""Data-level constructions: gluing along separating arcs, connected sums
at fixed corners, principal torus-bundle lifts, and quotient/cover
descriptors.

Gluing is combinatorics-first: the two chambers are joined along their
cut arcs, the resulting cyclic side/corner structure is rebuilt with
merged walls (the arcs meet the walls orthogonally, so two glued wall
pieces continue each other as a single geodesic side), and the curvature
of the result is re-derived from its own angle sum.  The metric is
re-solved by the canonical realization rather than transported, which is
what lets two flat squares produce a hyperbolic hexagon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .groups import TorusHom, TorusSubgroup, restrict_hom
from .polar_data import (
    Chamber,
    Corner,
    GroupGraph,
    PolarData,
    PolarGroupSpec,
    Side,
    torus_reflection_group_order,
    validate,
)


class ConstructionError(ValueError):
    pass


# -- cut arcs ---------------------------------------------------------------------


@dataclass(frozen=True)
class CutArc:
    """A separating arc in a chamber, given combinatorially.

    * corner truncation: ``corner`` names the corner cut off at the given
      ``radius`` along both adjacent sides;
    * cross cut (2D): the arc runs from ``side_a`` (at arc length ``t_a``)
      to ``side_b`` (at ``t_b``), meeting both orthogonally; the kept
      piece is the side chain from ``side_a`` forward to ``side_b``;
    * point cut (1D): the interval is cut at position ``t``; ``keep``
      selects the endpoint ('minus' or 'plus') of the kept part.
    """

    kind: str  # 'corner' | 'cross' | 'point'
    corner: str | None = None
    radius: float = 0.25
    side_a: str | None = None
    t_a: float = 0.5
    side_b: str | None = None
    t_b: float = 0.5
    t: float = 0.5
    keep: str = "minus"


def corner_truncation(corner_id, radius=0.25) -> CutArc:
    return CutArc(kind="corner", corner=corner_id, radius=radius)


def cross_cut(side_a, t_a, side_b, t_b) -> CutArc:
    return CutArc(kind="cross", side_a=side_a, t_a=t_a, side_b=side_b, t_b=t_b)


def point_cut(t, keep="minus") -> CutArc:
    return CutArc(kind="point", t=t, keep=keep)


def arc_report(data: PolarData, arc: CutArc):
    """Check the arc against the realized chamber; returns problem strings."""
    problems = []
    chamber = data.chamber
    if arc.kind == "point":
        if chamber.dimension != 1:
            problems.append("point cuts apply to 1-dimensional chambers")
        elif not 0 < arc.t < chamber.length:
            problems.append("cut point outside the interval interior")
        return problems
    if chamber.dimension != 2:
        problems.append("corner and cross cuts apply to 2-dimensional chambers")
        return problems
    from .coxeter import realize_chamber

    lengths = realize_chamber(chamber).side_lengths()
    if arc.kind == "corner":
        a, b = chamber.corner_sides(arc.corner)
        lim = min(lengths[a], lengths[b])
        if not 0 < arc.radius < lim:
            problems.append(
                f"truncation radius {arc.radius} leaves no room on sides {a!r}, {b!r} "
                f"(lengths {lengths[a]:.3g}, {lengths[b]:.3g})"
            )
    else:
        if arc.side_a == arc.side_b:
            problems.append("cross cut needs two distinct sides")
        for sid, t in ((arc.side_a, arc.t_a), (arc.side_b, arc.t_b)):
            if not 0 < t < lengths[sid]:
                problems.append(f"cut point {t} outside the interior of side {sid!r}")
    return problems


# -- gluing ------------------------------------------------------------------------


def _arc_wall_marks(data, arc):
    """(principal, first-wall mark, second-wall mark) met by the arc."""
    g = data.graph
    if arc.kind == "point":
        return (g.principal, None, None)
    if arc.kind == "corner":
        prev_id, next_id = data.chamber.corner_sides(arc.corner)
    else:
        prev_id, next_id = arc.side_a, arc.side_b
    return (g.principal, g.face_marks[prev_id], g.face_marks[next_id])


def glue(
    data_a: PolarData,
    arc_a: CutArc,
    data_b: PolarData,
    arc_b: CutArc,
    result_pi: PolarGroupSpec | None = None,
    catalog=None,
) -> PolarData:
    """Glue two chambers along matching cut arcs.

    The identification is the canonical orientation-reversing one: the
    wall met first by ``arc_a`` merges with the wall met first by
    ``arc_b``, second with second, so those marks must agree pairwise and
    the principal marks must coincide.  The result is re-validated when a
    catalog is available or the marks are all tori.  The polar group of
    the result is supplied via ``result_pi``; for torus marks it is
    derived from the face involutions when omitted.
    """
    ha, first_a, second_a = _arc_wall_marks(data_a, arc_a)
    hb, first_b, second_b = _arc_wall_marks(data_b, arc_b)
    if ha != hb:
        raise ConstructionError(f"principal marks differ: {ha!r} vs {hb!r}")
    if arc_a.kind != arc_b.kind:
        raise ConstructionError(f"arc kinds differ: {arc_a.kind} vs {arc_b.kind}")
    if arc_a.kind != "point":
        if first_a != first_b:
            raise ConstructionError(
                f"mark mismatch on the first glued wall: {first_a!r} vs {first_b!r}"
            )
        if second_a != second_b:
            raise ConstructionError(
                f"mark mismatch on the second glued wall: {second_a!r} vs {second_b!r}"
            )
    for label, data, arc in (("A", data_a, arc_a), ("B", data_b, arc_b)):
        problems = arc_report(data, arc)
        if problems:
            raise ConstructionError(f"bad arc on {label}: " + "; ".join(problems))

    if arc_a.kind == "point":
        out = _glue_intervals(data_a, arc_a, data_b, arc_b, result_pi)
    elif arc_a.kind == "corner":
        ca = data_a.chamber.corner_index(arc_a.corner)
        cb = data_b.chamber.corner_index(arc_b.corner)
        out = _splice_at_corners(data_a, ca, data_b, cb, result_pi)
    else:
        out = _splice_cross(data_a, arc_a, data_b, arc_b, result_pi)

    if catalog is not None or _all_torus(out):
        report = validate(out, catalog)
        if not report.valid:
            raise ConstructionError(f"glued data fails validation:\n{report}")
    return out


def connected_sum_fixed_points(
    data_a: PolarData,
    corner_a: str,
    data_b: PolarData,
    corner_b: str,
    radius: float = 0.2,
    result_pi: PolarGroupSpec | None = None,
    catalog=None,
) -> PolarData:
    """Connected sum at two fixed corners with equivalent slice data:
    equal corner marks and equal corner angle orders."""
    ka = data_a.graph.corner_marks[corner_a]
    kb = data_b.graph.corner_marks[corner_b]
    if ka != kb:
        raise ConstructionError(f"corner marks differ: {ka!r} vs {kb!r}")
    ma = data_a.chamber.corners[data_a.chamber.corner_index(corner_a)].order
    mb = data_b.chamber.corners[data_b.chamber.corner_index(corner_b)].order
    if ma != mb:
        raise ConstructionError(
            f"slice representations inequivalent: corner angle orders {ma} != {mb}"
        )
    return glue(
        data_a,
        corner_truncation(corner_a, radius),
        data_b,
        corner_truncation(corner_b, radius),
        result_pi=result_pi,
        catalog=catalog,
    )


def _all_torus(data):
    marks = [data.graph.principal] + list(data.graph.face_marks.values()) + list(
        data.graph.corner_marks.values()
    )
    return all(isinstance(m, TorusSubgroup) for m in marks)


def _derive_pi(data, result_pi):
    if result_pi is not None:
        return result_pi
    order = torus_reflection_group_order(data)
    if order is not None:
        return PolarGroupSpec(order=order, name=f"Z2^{order.bit_length() - 1}")
    return None


def _glue_intervals(data_a, arc_a, data_b, arc_b, result_pi):
    la = arc_a.t if arc_a.keep == "minus" else data_a.chamber.length - arc_a.t
    lb = arc_b.t if arc_b.keep == "minus" else data_b.chamber.length - arc_b.t
    # the kept endpoint of A becomes 'minus', the kept endpoint of B 'plus'
    marks = {
        "minus": data_a.graph.face_marks[arc_a.keep],
        "plus": data_b.graph.face_marks[arc_b.keep],
    }
    chamber = Chamber(dimension=1, curvature=data_a.chamber.curvature, length=la + lb)
    graph = GroupGraph(principal=data_a.graph.principal, face_marks=marks)
    out = PolarData(chamber, graph, None)
    return PolarData(chamber, graph, _derive_pi(out, result_pi))


def _splice_at_corners(data_a, ca, data_b, cb, result_pi):
    """Corner-truncation gluing.

    Walking the glued boundary: the side before A's corner continues into
    the side before B's corner (one merged wall), then B's boundary is
    traversed in reverse back to the side after its corner, which
    continues into the side after A's corner (the second merged wall),
    then A's boundary continues forward.
    """
    A, B = data_a.chamber, data_b.chamber
    ga, gb = data_a.graph, data_b.graph
    kA, kB = A.k, B.k

    sides = []  # (id, length, mark)
    corners = []  # (id, order, mark)

    pa, pb = A.sides[(ca - 1) % kA], B.sides[(cb - 1) % kB]
    na, nb = A.sides[ca % kA], B.sides[cb % kB]
    sides.append((f"{pa.id}+{pb.id}", pa.length + pb.length, ga.face_marks[pa.id]))
    for step in range(1, kB - 1):
        s = B.sides[(cb - 1 - step) % kB]
        sides.append((f"B.{s.id}", s.length, gb.face_marks[s.id]))
    sides.append((f"{nb.id}+{na.id}", nb.length + na.length, ga.face_marks[na.id]))
    for step in range(1, kA - 1):
        s = A.sides[(ca + step) % kA]
        sides.append((f"A.{s.id}", s.length, ga.face_marks[s.id]))

    c = A.corners[(ca - 1) % kA]
    corners.append((f"A.{c.id}", c.order, ga.corner_marks[c.id]))
    for i in range(1, kB):
        c = B.corners[(cb - i) % kB]
        corners.append((f"B.{c.id}", c.order, gb.corner_marks[c.id]))
    for j in range(1, kA - 1):
        c = A.corners[(ca + j) % kA]
        corners.append((f"A.{c.id}", c.order, ga.corner_marks[c.id]))

    return _assemble(ga.principal, sides, corners, result_pi)


def _splice_cross(data_a, arc_a, data_b, arc_b, result_pi):
    """Cross-cut gluing: each kept piece is the side chain from side_a
    forward to side_b; A's chain is traversed forward, B's in reverse."""
    A, B = data_a.chamber, data_b.chamber
    ga, gb = data_a.graph, data_b.graph
    kA, kB = A.k, B.k
    ia_a, ib_a = A.side_index(arc_a.side_a), A.side_index(arc_a.side_b)
    ia_b, ib_b = B.side_index(arc_b.side_a), B.side_index(arc_b.side_b)

    sides = []
    corners = []
    sa_a, sb_a = A.sides[ia_a], A.sides[ib_a]
    sa_b, sb_b = B.sides[ia_b], B.sides[ib_b]
    sides.append((f"{sa_a.id}+{sa_b.id}", arc_a.t_a + arc_b.t_a, ga.face_marks[sa_a.id]))
    i = (ia_a + 1) % kA
    while i != ib_a:
        c = A.corners[i]
        corners.append((f"A.{c.id}", c.order, ga.corner_marks[c.id]))
        s = A.sides[i]
        sides.append((f"A.{s.id}", s.length, ga.face_marks[s.id]))
        i = (i + 1) % kA
    c = A.corners[ib_a]
    corners.append((f"A.{c.id}", c.order, ga.corner_marks[c.id]))
    sides.append(
        (
            f"{sb_a.id}+{sb_b.id}",
            (sb_a.length - arc_a.t_b) + (sb_b.length - arc_b.t_b),
            ga.face_marks[sb_a.id],
        )
    )
    i = ib_b
    while i != (ia_b + 1) % kB:
        c = B.corners[i]
        corners.append((f"B.{c.id}", c.order, gb.corner_marks[c.id]))
        s = B.sides[(i - 1) % kB]
        sides.append((f"B.{s.id}", s.length, gb.face_marks[s.id]))
        i = (i - 1) % kB
    c = B.corners[i]
    corners.append((f"B.{c.id}", c.order, gb.corner_marks[c.id]))
    # rotate corners: corner j sits between side j-1 and side j
    corners = corners[-1:] + corners[:-1]
    return _assemble(ga.principal, sides, corners, result_pi)


def _assemble(principal, sides, corners, result_pi):
    chamber = Chamber(
        dimension=2,
        sides=tuple(Side(i, l) for i, l, _ in sides),
        corners=tuple(Corner(i, o) for i, o, _ in corners),
    )
    graph = GroupGraph(
        principal=principal,
        face_marks={i: m for i, _, m in sides},
        corner_marks={i: m for i, _, m in corners},
    )
    out = PolarData(chamber, graph, None)
    return PolarData(chamber, graph, _derive_pi(out, result_pi))


# -- principal torus-bundle lifts -----------------------------------------------------


def bundle_lift(data: PolarData, fiber_rank: int, homs: dict) -> PolarData:
    """Lift torus data along vertex homomorphisms into T^fiber_rank.

    ``homs`` maps every graph vertex ('H', side and corner ids) to an
    ambient TorusHom T^n -> T^r.  Only the restriction to the vertex group
    matters; restrictions must be compatible along every arrow, i.e. the
    hom of the smaller group is the restriction of the larger one.  Each
    vertex group K is replaced by its graph {(phi_K(k), k)} inside
    T^(r+n); the projection to the second factor is injective on each
    graph by construction, which is the freeness of the fiber action.
    """
    if not _all_torus(data):
        raise ConstructionError("bundle lifts are computed for torus marks only")
    n = data.graph.principal.ambient_rank
    for v in data.vertices():
        if v not in homs:
            raise ConstructionError(f"missing homomorphism for vertex {v!r}")
        phi = homs[v]
        if phi.source_rank != n or phi.target_rank != fiber_rank:
            raise ConstructionError(
                f"hom at {v!r} must be T^{n} -> T^{fiber_rank}, "
                f"got T^{phi.source_rank} -> T^{phi.target_rank}"
            )
    for u, v in data.arrows():
        sub = data.graph.mark(u)
        if restrict_hom(homs[v], sub) != restrict_hom(homs[u], sub):
            raise ConstructionError(
                f"restriction incompatibility along the arrow {u} -> {v}: "
                f"the hom at {v!r} does not restrict to the hom at {u!r}"
            )

    def lift_mark(vertex):
        sub = data.graph.mark(vertex)
        phi = homs[vertex]
        rows = [tuple(phi.apply(b)) + tuple(b) for b in sub.basis]
        return TorusSubgroup(fiber_rank + n, rows)

    graph = GroupGraph(
        principal=lift_mark("H"),
        face_marks={f: lift_mark(f) for f in data.chamber.face_ids()},
        corner_marks={c: lift_mark(c) for c in data.chamber.corner_ids()},
    )
    out = PolarData(data.chamber, graph, None)
    pi = None
    if data.graph.principal.rank == 0:
        order = torus_reflection_group_order(out)
        if order is not None:
            pi = PolarGroupSpec(order=order, name=f"Z2^{order.bit_length() - 1}")
    return PolarData(data.chamber, graph, pi)


def lift_freeness_report(data: PolarData, fiber_rank: int):
    """Injectivity of the second-factor projection on each lifted vertex
    lattice (constructive, reported for transparency)."""
    report = []
    for v in data.vertices():
        sub = data.graph.mark(v)
        proj = [b[fiber_rank:] for b in sub.basis]
        from . import lattice

        ok = lattice.lattice_span(proj, sub.ambient_rank - fiber_rank).rank == sub.rank
        report.append((v, ok))
    return report


def forget_lift(data: PolarData, fiber_rank: int) -> PolarData:
    """Project all marks to the second factor, inverting ``bundle_lift``."""
    if not _all_torus(data):
        raise ConstructionError("forgetting a lift applies to torus marks only")
    n = data.graph.principal.ambient_rank - fiber_rank

    def drop(sub):
        return TorusSubgroup(n, [b[fiber_rank:] for b in sub.basis])

    graph = GroupGraph(
        principal=drop(data.graph.principal),
        face_marks={f: drop(g) for f, g in data.graph.face_marks.items()},
        corner_marks={c: drop(g) for c, g in data.graph.corner_marks.items()},
    )
    out = PolarData(data.chamber, graph, None)
    pi = None
    if graph.principal.rank == 0:
        order = torus_reflection_group_order(out)
        if order is not None:
            pi = PolarGroupSpec(order=order, name=f"Z2^{order.bit_length() - 1}")
    return PolarData(data.chamber, graph, pi)


# -- quotients and covers ---------------------------------------------------------------


@dataclass(frozen=True)
class ChamberSymmetry:
    """Dihedral symmetry of the cyclic side structure: side i maps to
    rotation + i, or rotation - i when flipped."""

    rotation: int
    flip: bool = False

    def apply_side(self, i, k):
        return (self.rotation - i) % k if self.flip else (self.rotation + i) % k

    def apply_corner(self, j, k):
        # corner j sits between sides j-1 and j
        return (self.rotation - j + 1) % k if self.flip else (self.rotation + j) % k

    def compose(self, other, k):
        """self after other."""
        if not other.flip and not self.flip:
            return ChamberSymmetry((self.rotation + other.rotation) % k, False)
        if other.flip and not self.flip:
            return ChamberSymmetry((self.rotation + other.rotation) % k, True)
        if not other.flip and self.flip:
            return ChamberSymmetry((self.rotation - other.rotation) % k, True)
        return ChamberSymmetry((self.rotation - other.rotation) % k, False)


@dataclass(frozen=True)
class MarkedSymmetry:
    """A chamber symmetry together with the mark conjugation it induces:
    ``witness`` maps named-group names; torus marks must be preserved."""

    symmetry: ChamberSymmetry
    witness: tuple = ()  # sorted tuple of (name, image) pairs

    def witness_map(self):
        return dict(self.witness)


@dataclass(frozen=True)
class ExceptionalDescriptor:
    """Associated-bundle description of an action with no singular
    orbits: a coset space, a section label, and a polar group label."""

    coset_space: str
    section: str
    polar_group: str


@dataclass
class QuotientDescriptor:
    base: PolarData | None
    group_name: str
    elements: list = field(default_factory=list)  # closed list of MarkedSymmetry
    normal_in_pi: bool = False
    pi_label: str = ""
    side_orbits: list = field(default_factory=list)
    corner_orbits: list = field(default_factory=list)
    exceptional: ExceptionalDescriptor | None = None


def _check_marked_symmetry(data: PolarData, ms: MarkedSymmetry):
    chamber = data.chamber
    k = chamber.k
    wit = ms.witness_map()

    def image(mark):
        if isinstance(mark, TorusSubgroup):
            return mark  # torus marks conjugate trivially
        name = wit.get(mark.name, mark.name)
        from .groups import NamedGroup

        return NamedGroup(name)

    for i, s in enumerate(chamber.sides):
        j = ms.symmetry.apply_side(i, k)
        t = chamber.sides[j]
        if abs(s.length - t.length) > 1e-9:
            raise ConstructionError(
                f"symmetry does not preserve side lengths: {s.id!r} -> {t.id!r}"
            )
        if image(data.graph.face_marks[s.id]) != data.graph.face_marks[t.id]:
            raise ConstructionError(
                f"missing conjugation witness: side {s.id!r} mark does not map to "
                f"the mark of side {t.id!r}"
            )
    for j, c in enumerate(chamber.corners):
        jj = ms.symmetry.apply_corner(j, k)
        t = chamber.corners[jj]
        if c.order != t.order:
            raise ConstructionError(
                f"symmetry does not preserve angle orders: {c.id!r} -> {t.id!r}"
            )
        if image(data.graph.corner_marks[c.id]) != data.graph.corner_marks[t.id]:
            raise ConstructionError(
                f"missing conjugation witness: corner {c.id!r} mark does not map to "
                f"the mark of corner {t.id!r}"
            )


def _close_group(data, generators):
    k = data.chamber.k
    elements = {(0, False): MarkedSymmetry(ChamberSymmetry(0, False))}
    frontier = list(elements.values())
    while frontier:
        new = []
        for e in frontier:
            for g in generators:
                sym = g.symmetry.compose(e.symmetry, k)
                wit = dict(e.witness)
                gw = g.witness_map()
                composed = {a: gw.get(b, b) for a, b in e.witness}
                for a, b in gw.items():
                    composed.setdefault(a, b)
                ms = MarkedSymmetry(sym, tuple(sorted(composed.items())))
                key = (sym.rotation, sym.flip)
                if key not in elements:
                    elements[key] = ms
                    new.append(ms)
        frontier = new
        if len(elements) > 4 * k:
            raise ConstructionError("symmetry group closure exceeded the dihedral bound")
    return list(elements.values())


def quotient_descriptor(
    data: PolarData, generators, group_name: str, normal_in_pi: bool
) -> QuotientDescriptor:
    """Descriptor of the quotient by a marked-chamber symmetry group.

    Each generator must preserve the strata (lengths and angle orders)
    and carry its mark conjugations as a witness.  The group must be
    declared normal in the polar group; a False flag is rejected, since
    normality cannot be inferred from chamber data.
    """
    if data.chamber.dimension != 2:
        raise ConstructionError("quotient descriptors are implemented for 2-dimensional chambers")
    if not normal_in_pi:
        raise ConstructionError(
            f"{group_name} is declared not normal in the polar group; quotient rejected"
        )
    for g in generators:
        _check_marked_symmetry(data, g)
    elements = _close_group(data, generators)
    for e in elements:
        _check_marked_symmetry(data, e)
    k = data.chamber.k
    side_orbits = _orbits(k, elements, lambda e, i: e.symmetry.apply_side(i, k))
    corner_orbits = _orbits(k, elements, lambda e, j: e.symmetry.apply_corner(j, k))
    pi_name = data.declared_pi.name if data.declared_pi else "Pi"
    return QuotientDescriptor(
        base=data,
        group_name=group_name,
        elements=elements,
        normal_in_pi=normal_in_pi,
        pi_label=f"{pi_name}.{group_name}",
        side_orbits=[[data.chamber.sides[i].id for i in orbit] for orbit in side_orbits],
        corner_orbits=[[data.chamber.corners[j].id for j in orbit] for orbit in corner_orbits],
    )


def _orbits(k, elements, act):
    seen = set()
    orbits = []
    for i in range(k):
        if i in seen:
            continue
        orbit = sorted({act(e, i) for e in elements})
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def cover_expand(descriptor: QuotientDescriptor):
    """Recover the covering chamber data from a quotient descriptor.

    Returns the base PolarData (the group action data stays attached to
    the descriptor); an exceptional-type descriptor (no singular strata)
    yields its ExceptionalDescriptor instead.
    """
    if descriptor.exceptional is not None:
        return descriptor.exceptional
    if descriptor.base is None:
        raise ConstructionError("malformed descriptor: no base data and no exceptional payload")
    return descriptor.base
