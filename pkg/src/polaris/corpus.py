"""Bundled example data: the classic cohomogeneity-two actions used
throughout the test-suite and the docs.

Each builder returns a fresh ``PolarData``.  ``write_corpus`` materializes
them as JSON files together with the default catalog.
"""

from __future__ import annotations

import json
import os

from .groups import NamedGroup, TorusHom, catalog_to_json, circle, full_torus, trivial_group
from .polar_data import (
    Chamber,
    Corner,
    GroupGraph,
    PolarData,
    PolarGroupSpec,
    Side,
    save,
)


def su6_cp14() -> PolarData:
    """SU(6) acting on CP^14 with a spherical (pi/3, pi/4, pi/2) triangle
    as orbit space; the section is RP^2 and the polar group has order 24."""
    chamber = Chamber(
        dimension=2,
        sides=(Side("left", 1.0), Side("bottom", 1.0), Side("right", 1.0)),
        corners=(Corner("top", 3), Corner("bl", 4), Corner("br", 2)),
    )
    graph = GroupGraph(
        principal=NamedGroup("Sp(1)^3"),
        face_marks={
            "left": NamedGroup("Sp(1)Sp(2)"),
            "bottom": NamedGroup("Sp(1)^3S^1"),
            "right": NamedGroup("Sp(2)Sp(1)"),
        },
        corner_marks={
            "top": NamedGroup("Sp(3)"),
            "bl": NamedGroup("S(U(2)U(4))"),
            "br": NamedGroup("Sp(2)U(2)"),
        },
    )
    return PolarData(chamber, graph, PolarGroupSpec(order=24, name="C3/Z2", orientable=False))


def so3_su3so3() -> PolarData:
    """SO(3) on the symmetric space SU(3)/SO(3): flat equilateral triangle
    with all angles pi/3, fixed points at the corners, polar group D3."""
    chamber = Chamber(
        dimension=2,
        sides=(Side("left", 1.0), Side("bottom", 1.0), Side("right", 1.0)),
        corners=(Corner("top", 3), Corner("bl", 3), Corner("br", 3)),
    )
    graph = GroupGraph(
        principal=NamedGroup("Z2^2"),
        face_marks={
            "left": NamedGroup("O(2)"),
            "bottom": NamedGroup("O''(2)"),
            "right": NamedGroup("O'(2)"),
        },
        corner_marks={
            "top": NamedGroup("SO(3)"),
            "bl": NamedGroup("SO(3)"),
            "br": NamedGroup("SO(3)"),
        },
    )
    return PolarData(chamber, graph, PolarGroupSpec(order=6, name="D3", orientable=None))


def so4_m8() -> PolarData:
    """SO(4) on an 8-manifold: hyperbolic (pi/6, pi/6, pi/3) triangle,
    polar group D6, section a genus-2 surface."""
    chamber = Chamber(
        dimension=2,
        sides=(Side("left", 1.0), Side("bottom", 1.0), Side("right", 1.0)),
        corners=(Corner("top", 6), Corner("bl", 6), Corner("br", 3)),
    )
    graph = GroupGraph(
        principal=NamedGroup("Z2^2"),
        face_marks={
            "left": NamedGroup("O(2)"),
            "bottom": NamedGroup("O''(2)"),
            "right": NamedGroup("O'(2)"),
        },
        corner_marks={
            "top": NamedGroup("SO(4)"),
            "bl": NamedGroup("SO(4)"),
            "br": NamedGroup("SO(3)"),
        },
    )
    return PolarData(chamber, graph, PolarGroupSpec(order=12, name="D6", orientable=True))


def torus_square(k=2) -> PolarData:
    """T^2 on S^2 x S^2 (k even) or CP^2 # -CP^2 (k odd): flat right-angled
    square whose sides carry circles of slopes (0,1), (1,0), (k,1), (1,0)."""
    chamber = Chamber(
        dimension=2,
        sides=(Side("s1", 1.0), Side("s2", 1.0), Side("s3", 1.0), Side("s4", 1.0)),
        corners=(Corner("c1", 2), Corner("c2", 2), Corner("c3", 2), Corner("c4", 2)),
    )
    graph = GroupGraph(
        principal=trivial_group(2),
        face_marks={
            "s1": circle(2, (0, 1)),
            "s2": circle(2, (1, 0)),
            "s3": circle(2, (k, 1)),
            "s4": circle(2, (1, 0)),
        },
        corner_marks={c: full_torus(2) for c in ("c1", "c2", "c3", "c4")},
    )
    return PolarData(chamber, graph, PolarGroupSpec(order=4, name="Z2xZ2", orientable=True))


def torus_hexagon(k=2) -> PolarData:
    """Right-angled hyperbolic hexagon obtained by summing two squares at
    fixed points; the section is a genus-2 surface with |Pi| = 4."""
    slopes = [(0, 1), (1, 0), (k, 1), (1, 0), (k, 1), (1, 0)]
    sides = tuple(Side(f"s{i+1}", 1.0) for i in range(6))
    corners = tuple(Corner(f"c{i+1}", 2) for i in range(6))
    graph = GroupGraph(
        principal=trivial_group(2),
        face_marks={f"s{i+1}": circle(2, v) for i, v in enumerate(slopes)},
        corner_marks={f"c{i+1}": full_torus(2) for i in range(6)},
    )
    chamber = Chamber(dimension=2, sides=sides, corners=corners)
    return PolarData(chamber, graph, PolarGroupSpec(order=4, name="Z2xZ2", orientable=True))


def cp2_fan() -> PolarData:
    """T^2 on CP^2: spherical right-angled triangle, slopes the standard
    projective fan (1,0), (0,1), (-1,-1); the section is RP^2."""
    chamber = Chamber(
        dimension=2,
        sides=(Side("s1", 1.0), Side("s2", 1.0), Side("s3", 1.0)),
        corners=(Corner("c1", 2), Corner("c2", 2), Corner("c3", 2)),
    )
    graph = GroupGraph(
        principal=trivial_group(2),
        face_marks={
            "s1": circle(2, (1, 0)),
            "s2": circle(2, (0, 1)),
            "s3": circle(2, (-1, -1)),
        },
        corner_marks={c: full_torus(2) for c in ("c1", "c2", "c3")},
    )
    return PolarData(chamber, graph, PolarGroupSpec(order=4, name="Z2xZ2", orientable=False))


def circle_on_cp1() -> PolarData:
    """The rotation action of the circle on CP^1 = S^2: interval orbit
    space with both endpoints fixed (full isotropy)."""
    chamber = Chamber(dimension=1, curvature=1, length=3.141592653589793)
    graph = GroupGraph(
        principal=trivial_group(1),
        face_marks={"minus": full_torus(1), "plus": full_torus(1)},
    )
    return PolarData(chamber, graph, PolarGroupSpec(order=2, name="Z2", orientable=True))


def hopf_lift_homs():
    """Vertex homomorphisms lifting the CP^1 interval to the Hopf action
    of T^2 on S^3: identity on one endpoint group, trivial on the other.
    Homs are ambient (T^1 -> T^1); only the restriction to each vertex
    group matters."""
    return {
        "H": TorusHom.zero(1, 1),
        "minus": TorusHom.identity(1),
        "plus": TorusHom.zero(1, 1),
    }


def t2_s3_interval() -> PolarData:
    """The standard T^2 action on S^3: interval whose endpoint circles
    span the torus unimodularly (the target of the Hopf lift; the
    interval length is inherited from the base chamber)."""
    chamber = Chamber(dimension=1, curvature=1, length=3.141592653589793)
    graph = GroupGraph(
        principal=trivial_group(2),
        face_marks={"minus": circle(2, (1, 1)), "plus": circle(2, (0, 1))},
    )
    return PolarData(chamber, graph, PolarGroupSpec(order=4, name="Z2xZ2", orientable=True))


BUILDERS = {
    "su6_cp14": su6_cp14,
    "so3_su3so3": so3_su3so3,
    "so4_m8": so4_m8,
    "torus_square_k2": torus_square,
    "torus_hexagon": torus_hexagon,
    "cp2": cp2_fan,
    "cp1_interval": circle_on_cp1,
}


def write_corpus(directory):
    """Materialize every bundled example plus the default catalog."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, builder in BUILDERS.items():
        path = os.path.join(directory, f"{name}.json")
        save(builder(), path)
        written.append(path)
    from .groups import load_catalog

    cat = load_catalog()
    path = os.path.join(directory, "catalog.json")
    with open(path, "w") as fh:
        fh.write(json.dumps(catalog_to_json(list(cat.entries.values())), indent=2) + "\n")
    written.append(path)
    return written
