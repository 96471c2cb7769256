"""The marked-chamber data of a polar action and its compatibility checks.

A 2-dimensional chamber is a geodesic polygon of constant curvature whose
corner angles are pi/m with m in {2, 3, 4, 6}; a 1-dimensional chamber is
an interval.  The group graph marks the interior with the principal
isotropy group, each side with a face group and each corner with a corner
group, with arrows recording codimension-1 containment.  ``validate``
runs the local compatibility relations: face groups mod the principal
group are spheres, each corner pair acts with cohomogeneity one on a
sphere with dihedral order matching the corner angle, and corner groups
are generated by their two faces.

Angle orders are kept as exact integers and areas as exact rational
multiples of pi, so all Gauss-Bonnet accounting is tolerance-free.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import lattice
from .groups import (
    Catalog,
    GroupError,
    NamedGroup,
    TorusSubgroup,
    group_from_json,
    group_to_json,
)

ANGLE_ORDERS = (2, 3, 4, 6)

ENDPOINT_IDS = ("minus", "plus")


class DataError(ValueError):
    """Malformed chamber or graph data (hard error, not a report entry)."""


@dataclass(frozen=True)
class Side:
    id: str
    length: float


@dataclass(frozen=True)
class Corner:
    id: str
    order: int  # interior angle is pi/order


@dataclass(frozen=True)
class Chamber:
    """A 1- or 2-dimensional constant-curvature chamber.

    For dimension 2, ``sides`` and ``corners`` are parallel cyclic lists:
    corner i sits between side i-1 and side i.  For dimension 1 the
    chamber is an interval of the given length with the two endpoints as
    its codimension-1 strata, labelled 'minus' and 'plus'.

    ``curvature`` is +1, 0 or -1, or None meaning 'determined by the
    angle sum through Gauss-Bonnet'.
    """

    dimension: int
    curvature: int | None = None
    sides: tuple = ()
    corners: tuple = ()
    length: float | None = None

    def __post_init__(self):
        if self.dimension == 1:
            if self.length is None or self.length <= 0:
                raise DataError("1-dimensional chamber needs a positive length")
            if self.sides or self.corners:
                raise DataError("1-dimensional chamber has no sides or corners")
        elif self.dimension == 2:
            if len(self.sides) != len(self.corners):
                raise DataError("a geodesic polygon has as many corners as sides")
            if len(self.sides) < 2:
                raise DataError("2-dimensional chamber needs at least two sides")
            ids = [s.id for s in self.sides] + [c.id for c in self.corners]
            if len(set(ids)) != len(ids):
                raise DataError("side and corner ids must be distinct")
            for c in self.corners:
                if c.order not in ANGLE_ORDERS:
                    raise DataError(f"corner {c.id!r}: angle order {c.order} not in {{2,3,4,6}}")
            for s in self.sides:
                if s.length <= 0:
                    raise DataError(f"side {s.id!r}: length must be positive")
        else:
            raise DataError("chamber dimension must be 1 or 2")
        if self.curvature not in (None, -1, 0, 1):
            raise DataError("curvature sign must be -1, 0, +1 or None (auto)")

    @property
    def k(self):
        return len(self.sides)

    def side_index(self, side_id):
        for i, s in enumerate(self.sides):
            if s.id == side_id:
                return i
        raise DataError(f"unknown side {side_id!r}")

    def corner_index(self, corner_id):
        for i, c in enumerate(self.corners):
            if c.id == corner_id:
                return i
        raise DataError(f"unknown corner {corner_id!r}")

    def corner_sides(self, corner_id):
        """Ids of the two sides meeting at a corner (previous, next)."""
        i = self.corner_index(corner_id)
        return self.sides[i - 1].id, self.sides[i].id

    def face_ids(self):
        if self.dimension == 1:
            return list(ENDPOINT_IDS)
        return [s.id for s in self.sides]

    def corner_ids(self):
        return [] if self.dimension == 1 else [c.id for c in self.corners]


@dataclass(frozen=True)
class GroupGraph:
    """Marking of the chamber strata by isotropy groups.

    ``face_marks`` maps side ids (endpoint ids 'minus'/'plus' in the
    1-dimensional case) to group references, ``corner_marks`` corner ids.
    Arrows are derived, never stored: the principal vertex points to each
    face, each face to the corners on its closure.
    """

    principal: object
    face_marks: dict
    corner_marks: dict = field(default_factory=dict)

    def mark(self, vertex):
        if vertex == "H":
            return self.principal
        if vertex in self.face_marks:
            return self.face_marks[vertex]
        if vertex in self.corner_marks:
            return self.corner_marks[vertex]
        raise DataError(f"unknown graph vertex {vertex!r}")


@dataclass(frozen=True)
class PolarGroupSpec:
    """Declared polar group: order (None = infinite), a free-text name and
    an optional orientability flag for the section."""

    order: int | None
    name: str = ""
    orientable: bool | None = None


@dataclass(frozen=True)
class PolarData:
    chamber: Chamber
    graph: GroupGraph
    declared_pi: PolarGroupSpec | None = None

    def __post_init__(self):
        faces = set(self.chamber.face_ids())
        if set(self.graph.face_marks) != faces:
            raise DataError(
                f"face marks {sorted(self.graph.face_marks)} do not cover sides {sorted(faces)}"
            )
        corners = set(self.chamber.corner_ids())
        if set(self.graph.corner_marks) != corners:
            raise DataError(
                f"corner marks {sorted(self.graph.corner_marks)} do not cover corners {sorted(corners)}"
            )

    def vertices(self):
        """Graph vertex names: 'H', then face ids, then corner ids."""
        return ["H"] + self.chamber.face_ids() + self.chamber.corner_ids()

    def arrows(self):
        """Derived arrow list (lower vertex, higher vertex)."""
        out = [("H", f) for f in self.chamber.face_ids()]
        for cid in self.chamber.corner_ids():
            a, b = self.chamber.corner_sides(cid)
            out.append((a, cid))
            out.append((b, cid))
        return out


# -- graph combinatorics ------------------------------------------------------


def history(data: PolarData, vertex):
    """All vertices whose arrow chains end at ``vertex``, including it."""
    if vertex not in data.vertices():
        raise DataError(f"unknown graph vertex {vertex!r}")
    incoming = {}
    for a, b in data.arrows():
        incoming.setdefault(b, set()).add(a)
    seen = {vertex}
    stack = [vertex]
    while stack:
        v = stack.pop()
        for u in incoming.get(v, ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    order = {v: i for i, v in enumerate(data.vertices())}
    return sorted(seen, key=order.get)


def depth(data: PolarData, vertex):
    """Graph distance from the principal vertex."""
    if vertex not in data.vertices():
        raise DataError(f"unknown graph vertex {vertex!r}")
    if vertex == "H":
        return 0
    if vertex in data.graph.face_marks:
        return 1
    return 2


# -- Gauss-Bonnet accounting --------------------------------------------------


@dataclass(frozen=True)
class ChamberGeometry:
    """Curvature sign and chamber area.

    ``area_over_pi`` is the exact rational A/pi for curvature +-1 and
    None in the flat case, where the area is a free metric parameter.
    """

    kappa: int
    area_over_pi: Fraction | None

    @property
    def area(self):
        import math

        return None if self.area_over_pi is None else float(self.area_over_pi) * math.pi


def angle_excess_over_pi(chamber: Chamber) -> Fraction:
    """(sum of interior angles - (k-2) pi) / pi, exactly."""
    if chamber.dimension != 2:
        raise DataError("angle sums are defined for 2-dimensional chambers")
    total = sum((Fraction(1, c.order) for c in chamber.corners), Fraction(0))
    return total - (chamber.k - 2)


def chamber_geometry(chamber: Chamber) -> ChamberGeometry:
    """Curvature sign from the angle sum, and the exact area for kappa != 0.

    Raises if the chamber declares a curvature inconsistent with its
    angle sum.  1-dimensional chambers report their declared curvature
    (flat by default) with area equal to the interval length.
    """
    if chamber.dimension == 1:
        kappa = chamber.curvature if chamber.curvature is not None else 0
        return ChamberGeometry(kappa=kappa, area_over_pi=None)
    excess = angle_excess_over_pi(chamber)
    kappa = (excess > 0) - (excess < 0)
    if chamber.curvature is not None and chamber.curvature != kappa:
        raise DataError(
            f"declared curvature {chamber.curvature:+d} inconsistent with angle sum "
            f"(excess {excess} pi implies {kappa:+d})"
        )
    if kappa == 0:
        return ChamberGeometry(kappa=0, area_over_pi=None)
    area = abs(excess)
    # spherical chambers are smaller than a hemisphere's double
    assert kappa != 1 or area < 2
    return ChamberGeometry(kappa=kappa, area_over_pi=area)


def torus_reflection_group_order(data: PolarData):
    """Order of the group generated by the face involutions for torus data.

    The unique involution of the circle S^1_v is its half-turn, i.e. v/2
    in (1/2 Z / Z)^n; the group those generate is the F_2-span of the
    slopes, of order 2^rank.  Returns None when any face mark is not a
    circle subtorus.
    """
    slopes = []
    for fid in data.chamber.face_ids():
        g = data.graph.face_marks[fid]
        if not isinstance(g, TorusSubgroup) or g.rank != 1:
            return None
        slopes.append(tuple(x % 2 for x in g.slope()))
    n = data.graph.face_marks[data.chamber.face_ids()[0]].ambient_rank
    rank = _f2_rank(slopes, n)
    return 2**rank


def _f2_rank(rows, n):
    rows = [list(r) for r in rows]
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % 2), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % 2:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# -- the compatibility validator ----------------------------------------------


@dataclass
class CheckResult:
    code: str
    location: str
    passed: bool
    message: str

    def __str__(self):
        status = "ok" if self.passed else "FAIL"
        return f"{self.code} @ {self.location}: {status} ({self.message})"


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    def add(self, code, location, passed, message):
        self.checks.append(CheckResult(code, location, passed, message))

    @property
    def valid(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __str__(self):
        head = "valid" if self.valid else "INVALID"
        return "\n".join([head] + [f"  {c}" for c in self.checks])


def _is_torus(g):
    return isinstance(g, TorusSubgroup)


def _resolve_named(g, catalog: Catalog):
    if isinstance(g, NamedGroup):
        catalog.resolve(g.name)  # raises GroupError on unknown names


def validate(data: PolarData, catalog: Catalog | None = None) -> ValidationReport:
    """Run the compatibility checks on marked-chamber data.

    V1  principal group contained in every face group,
    V2  face/principal quotients are spheres of dimension >= 1,
    V3  corner pairs act with cohomogeneity one at the declared angle
        order (torus corners force order 2),
    V4  corner groups are generated by their two faces (torus: the raw
        span of the two slopes is exactly the corner lattice),
    V5  declared curvature consistent with the angle sum,
    V6  declared polar group consistent with the Gauss-Bonnet account
        (and, for torus data, with the group generated by the face
        involutions).

    Unresolvable named groups raise; every other failure is reported.
    """
    report = ValidationReport()
    graph = data.graph
    chamber = data.chamber

    for vertex in data.vertices():
        g = graph.mark(vertex)
        if isinstance(g, NamedGroup):
            if catalog is None:
                raise GroupError("named group marks need a catalog")
            _resolve_named(g, catalog)

    h = graph.principal

    # V1/V2 on faces
    for fid in chamber.face_ids():
        k = graph.face_marks[fid]
        loc = f"face {fid}"
        if _is_torus(k) and _is_torus(h):
            ok = k.contains(h)
            report.add("V1", loc, ok, "principal lattice contained in face lattice" if ok else "principal group not contained in face group")
            circle_ok = k.rank == h.rank + 1 and k.span_index == 1 and all(
                lattice.is_primitive(b) for b in k.basis
            )
            report.add(
                "V2",
                loc,
                circle_ok,
                "face/principal quotient is a circle"
                if circle_ok
                else "face group mod principal is not a 1-sphere (check slope primitivity and rank)",
            )
        elif isinstance(k, NamedGroup) and isinstance(h, NamedGroup):
            ok = catalog.declares_subgroup(k.name, h.name)
            report.add("V1", loc, ok, f"{h.name} declared inside {k.name}" if ok else f"no declaration {h.name} < {k.name}")
            sdim = catalog.sphere_dim(k.name, h.name)
            ok2 = sdim is not None and sdim >= 1
            report.add(
                "V2",
                loc,
                ok2,
                f"{k.name}/{h.name} declared a {sdim}-sphere" if ok2 else f"{k.name}/{h.name} not declared a sphere of dimension >= 1",
            )
        else:
            report.add("V1", loc, False, "mixed torus/named marking is not supported")

    # V3/V4 on corners
    for cid in chamber.corner_ids():
        loc = f"corner {cid}"
        corner = chamber.corners[chamber.corner_index(cid)]
        kc = graph.corner_marks[cid]
        a_id, b_id = chamber.corner_sides(cid)
        ka, kb = graph.face_marks[a_id], graph.face_marks[b_id]
        if _is_torus(kc) and _is_torus(ka) and _is_torus(kb):
            ok3 = corner.order == 2
            report.add(
                "V3",
                loc,
                ok3,
                "torus corner has angle order 2" if ok3 else f"torus corners force order 2, got {corner.order}",
            )
            # use the marks as given: an imprimitive generator must surface here
            span = lattice.lattice_span(ka.raw_basis + kb.raw_basis, ka.ambient_rank)
            ok4 = span.index == 1 and span.rank == kc.rank and span.basis == kc.basis
            report.add(
                "V4",
                loc,
                ok4,
                "corner lattice is the direct span of its faces"
                if ok4
                else f"faces span index {span.index}, rank {span.rank}; corner not generated by faces",
            )
        elif isinstance(kc, NamedGroup) and isinstance(ka, NamedGroup) and isinstance(kb, NamedGroup):
            m = catalog.coh1_order(kc.name, ka.name, kb.name)
            ok3 = m == corner.order
            report.add(
                "V3",
                loc,
                ok3,
                f"declared cohomogeneity-one order {m} matches angle" if ok3 else f"declared order {m} != angle order {corner.order}",
            )
            ok4 = catalog.generates(kc.name, (ka.name, kb.name))
            report.add(
                "V4",
                loc,
                ok4,
                f"{kc.name} generated by {ka.name}, {kb.name}" if ok4 else f"no generation declaration for {kc.name}",
            )
        else:
            report.add("V3", loc, False, "mixed torus/named corner marking is not supported")

    # V5: curvature consistency
    if chamber.dimension == 2:
        try:
            geom = chamber_geometry(chamber)
            report.add("V5", "chamber", True, f"curvature sign {geom.kappa:+d} consistent with angle sum")
        except DataError as exc:
            geom = None
            report.add("V5", "chamber", False, str(exc))
    else:
        geom = ChamberGeometry(kappa=chamber.curvature or 0, area_over_pi=None)
        report.add("V5", "chamber", True, "1-dimensional chamber")

    # V6: declared polar group
    if data.declared_pi is not None and data.declared_pi.order is not None:
        n = data.declared_pi.order
        if chamber.dimension == 2 and geom is not None and geom.kappa != 0:
            chi2 = n * geom.kappa * geom.area_over_pi  # = 2 chi(Sigma)
            ok = chi2.denominator == 1
            msg = f"|Pi| Area = {n * geom.area_over_pi} pi gives chi = {chi2 / 2}"
            if ok and geom.kappa == 1:
                ok = chi2 / 2 in (1, 2)
                msg += " (spherical sections must close up to S^2 or RP^2)"
            report.add("V6", "declared polar group", ok, msg)
        else:
            report.add("V6", "declared polar group", True, "no Gauss-Bonnet constraint (flat or 1-dimensional)")
        derived = torus_reflection_group_order(data)
        if derived is not None:
            ok = derived == n
            report.add(
                "V6",
                "declared polar group",
                ok,
                f"face involutions generate a group of order {derived}"
                + ("" if ok else f", declared {n}"),
            )
    return report


# -- JSON round-trip -----------------------------------------------------------


def data_to_dict(data: PolarData):
    chamber = data.chamber
    if chamber.dimension == 1:
        cham = {
            "dimension": 1,
            "curvature": chamber.curvature,
            "length": chamber.length,
        }
    else:
        cham = {
            "dimension": 2,
            "curvature": chamber.curvature,
            "sides": [{"id": s.id, "length": s.length} for s in chamber.sides],
            "corners": [{"id": c.id, "order": c.order} for c in chamber.corners],
        }
    out = {
        "chamber": cham,
        "graph": {
            "principal": group_to_json(data.graph.principal),
            "faces": {k: group_to_json(v) for k, v in sorted(data.graph.face_marks.items())},
            "corners": {k: group_to_json(v) for k, v in sorted(data.graph.corner_marks.items())},
        },
    }
    if data.declared_pi is not None:
        out["pi"] = {
            "order": data.declared_pi.order,
            "name": data.declared_pi.name,
            "orientable": data.declared_pi.orientable,
        }
    return out


def data_from_dict(obj) -> PolarData:
    cham = obj["chamber"]
    if cham["dimension"] == 1:
        chamber = Chamber(dimension=1, curvature=cham.get("curvature"), length=cham["length"])
    else:
        chamber = Chamber(
            dimension=2,
            curvature=cham.get("curvature"),
            sides=tuple(Side(s["id"], float(s["length"])) for s in cham["sides"]),
            corners=tuple(Corner(c["id"], int(c["order"])) for c in cham["corners"]),
        )
    graph = GroupGraph(
        principal=group_from_json(obj["graph"]["principal"]),
        face_marks={k: group_from_json(v) for k, v in obj["graph"]["faces"].items()},
        corner_marks={k: group_from_json(v) for k, v in obj["graph"]["corners"].items()},
    )
    pi = None
    if "pi" in obj:
        pi = PolarGroupSpec(
            order=obj["pi"]["order"],
            name=obj["pi"].get("name", ""),
            orientable=obj["pi"].get("orientable"),
        )
    return PolarData(chamber=chamber, graph=graph, declared_pi=pi)


def dumps(data: PolarData) -> str:
    return json.dumps(data_to_dict(data), indent=2, sort_keys=True) + "\n"


def loads(text: str) -> PolarData:
    return data_from_dict(json.loads(text))


def save(data: PolarData, path):
    with open(path, "w") as fh:
        fh.write(dumps(data))


def load(path) -> PolarData:
    with open(path) as fh:
        return loads(fh.read())
