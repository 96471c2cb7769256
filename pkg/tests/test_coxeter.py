"""Coxeter matrices, chamber realizations, developments, invariants."""

import math

import numpy as np
import pytest

from polaris import corpus
from polaris import geometry as geo
from polaris.coxeter import (
    CLOSED_FINITE,
    INFINITE_CERTIFIED,
    CoxeterError,
    Development,
    RealizationError,
    coxeter_matrix,
    develop,
    pi_consistency,
    realize_chamber,
    section_invariants,
    tile_cover_defect,
)
from polaris.polar_data import Chamber, Corner, PolarGroupSpec, PolarData, Side


def polygon(orders, lengths=None):
    k = len(orders)
    lengths = lengths or [1.0] * k
    return Chamber(
        dimension=2,
        sides=tuple(Side(f"s{i}", lengths[i]) for i in range(k)),
        corners=tuple(Corner(f"c{i}", m) for i, m in enumerate(orders)),
    )


# -- Coxeter matrices -----------------------------------------------------------


def test_coxeter_matrix_triangle():
    m = coxeter_matrix(corpus.su6_cp14())
    # triangle: every side pair shares a corner; orders {3, 4, 2}
    offdiag = sorted(
        m.order(i, j) for i in range(3) for j in range(3) if i < j
    )
    assert offdiag == [2, 3, 4]
    assert all(m.order(i, i) == 1 for i in range(3))


def test_coxeter_matrix_square():
    m = coxeter_matrix(corpus.torus_square())
    assert m.order(0, 1) == m.order(1, 2) == m.order(2, 3) == m.order(0, 3) == 2
    assert m.order(0, 2) is None and m.order(1, 3) is None


def test_coxeter_matrix_interval():
    m = coxeter_matrix(corpus.circle_on_cp1())
    assert m.size == 2
    assert m.order(0, 1) is None


# -- realizations -----------------------------------------------------------------


def test_flat_unit_square_realization():
    r = realize_chamber(polygon([2, 2, 2, 2]))
    assert r.model == geo.EUCLIDEAN
    expected = np.array([[0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=float)
    assert np.abs(r.vertices - expected).max() < 1e-12
    assert r.contains(r.point((0.0, 0.0)))


def test_spherical_triangle_realization_area():
    # angles pi/3, pi/4, pi/2: spherical excess pi/12
    r = realize_chamber(polygon([3, 4, 2]))
    assert r.model == geo.SPHERICAL
    angles = []
    k = 3
    for i in range(k):
        w_in = r.walls[(i - 1) % k]
        t_in = geo.geodesic_tangent(r.model, w_in.a, w_in.u, np.array(w_in.length))
        angles.append(geo.angle_between(r.model, r.vertices[i], -t_in, r.walls[i].u))
    assert abs(sum(angles) - math.pi - math.pi / 12) < 1e-9


def test_right_angled_hexagon_realization():
    r = realize_chamber(polygon([2] * 6))
    assert r.model == geo.HYPERBOLIC
    lengths = [w.length for w in r.walls]
    # the regular right-angled hexagon satisfies cosh(side) = 2
    for l in lengths:
        assert abs(math.cosh(l) - 2.0) < 1e-9
    # interior anchor
    assert r.contains(r.anchor, margin=1e-9)


def test_hyperbolic_triangle_lengths_recomputed():
    with pytest.warns(UserWarning, match="stored lengths ignored"):
        realize_chamber(polygon([6, 6, 3], lengths=[2.0, 3.0, 4.0]))


def test_flat_rectangle_needs_opposite_sides_equal():
    with pytest.raises(RealizationError, match="opposite sides"):
        realize_chamber(polygon([2, 2, 2, 2], lengths=[1.0, 2.0, 1.5, 2.0]))


def test_given_hyperbolic_lengths_kept_when_closing():
    base = realize_chamber(polygon([2] * 6))
    good = [w.length for w in base.walls]
    r = realize_chamber(polygon([2] * 6, lengths=good))
    assert np.allclose([w.length for w in r.walls], good)


def test_biangle_realization():
    r = realize_chamber(polygon([3, 3]))
    assert r.model == geo.SPHERICAL
    assert np.abs(r.vertices[0] + r.vertices[1]).max() < 1e-12  # antipodal corners


# -- development -------------------------------------------------------------------


def test_spherical_triangle_development_order_48():
    dev = develop(corpus.su6_cp14())
    assert dev.status == CLOSED_FINITE
    assert dev.order == 48
    assert tile_cover_defect(dev) < 1e-9
    assert dev.group_closure_defect() == 0.0


def test_elliptic_334_order_24():
    data = polygon([2, 3, 3])
    dev = develop(data)
    assert dev.order == 24
    assert tile_cover_defect(dev) < 1e-9


@pytest.mark.parametrize("m", [2, 3, 4, 6])
def test_biangle_develops_to_dihedral(m):
    dev = develop(polygon([m, m]))
    assert dev.status == CLOSED_FINITE
    assert dev.order == 2 * m
    assert tile_cover_defect(dev) < 1e-9


def test_flat_triangle_certified_infinite():
    dev = develop(corpus.so3_su3so3())
    assert dev.status == INFINITE_CERTIFIED


def test_hyperbolic_certified_infinite():
    dev = develop(corpus.so4_m8())
    assert dev.status == INFINITE_CERTIFIED


def test_force_enumerate_flat_hits_budget():
    dev = develop(polygon([2, 2, 2, 2]), max_elems=50, force_enumerate=True)
    assert dev.status == "budget-exhausted"
    assert len(dev.elements) > 50


def test_word_matrices_are_products():
    dev = develop(corpus.su6_cp14())
    gens = [w.reflection for w in dev.realization.walls]
    rng = np.random.default_rng(3)
    for idx in rng.choice(len(dev.elements), size=10, replace=False):
        word, m = dev.elements[idx]
        prod = np.eye(3)
        for i in word:
            prod = prod @ gens[i]
        assert np.abs(prod - m).max() < 1e-9


def test_development_deterministic():
    a = develop(corpus.su6_cp14())
    b = develop(corpus.su6_cp14())
    assert a.words() == b.words()


def test_interval_development():
    # quarter-circle interval: dihedral group of order 8
    data = Chamber(dimension=1, curvature=1, length=math.pi / 4)
    dev = develop(data)
    assert dev.status == CLOSED_FINITE
    assert dev.order == 8
    # full half-circle interval: the two endpoint reflections coincide
    dev2 = develop(corpus.circle_on_cp1())
    assert dev2.order == 2


# -- section invariants ---------------------------------------------------------------


def test_section_invariants_su6():
    inv = section_invariants(corpus.su6_cp14())
    assert inv.chi == 1 and inv.surface == "RP^2"
    assert inv.consistent


def test_section_invariants_so4():
    inv = section_invariants(corpus.so4_m8())
    assert inv.kappa == -1
    assert inv.area_over_pi == pytest.approx(1 / 3)
    assert inv.chi == -2 and inv.genus == 2
    assert inv.consistent


def test_section_invariants_hexagon():
    inv = section_invariants(corpus.torus_hexagon())
    assert inv.chi == -2 and inv.genus == 2


def test_section_invariants_flat():
    inv = section_invariants(corpus.so3_su3so3())
    assert inv.chi == 0


def test_section_invariants_need_finite_pi():
    data = corpus.su6_cp14()
    bad = PolarData(data.chamber, data.graph, PolarGroupSpec(order=None, name="infinite"))
    with pytest.raises(CoxeterError, match="non-compact|undeclared"):
        section_invariants(bad)


def test_inconsistent_spherical_order_flagged():
    data = corpus.su6_cp14()
    bad = PolarData(data.chamber, data.graph, PolarGroupSpec(order=96, name="?"))
    inv = section_invariants(bad)
    assert not inv.consistent


# -- pi consistency ---------------------------------------------------------------------


def test_pi_consistency_su6():
    data = corpus.su6_cp14()
    dev = develop(data)
    report = pi_consistency(data, dev)
    assert report.consistent
    assert any("index 2" in m for _, m in report.entries)


def test_pi_consistency_flat_triangle():
    data = corpus.so3_su3so3()
    report = pi_consistency(data, develop(data))
    assert report.consistent


def test_pi_consistency_rejects_oversized_pi():
    data = corpus.su6_cp14()
    bad = PolarData(data.chamber, data.graph, PolarGroupSpec(order=96, name="?"))
    report = pi_consistency(bad, develop(bad))
    assert not report.consistent


def test_pi_consistency_unique_section():
    # biangle with |Pi| equal to the full dihedral order
    chamber = polygon([3, 3])
    from polaris.groups import NamedGroup
    from polaris.polar_data import GroupGraph

    data = PolarData(
        chamber,
        GroupGraph(
            principal=NamedGroup("Z2^2"),
            face_marks={"s0": NamedGroup("O(2)"), "s1": NamedGroup("O'(2)")},
            corner_marks={"c0": NamedGroup("SO(3)"), "c1": NamedGroup("SO(3)")},
        ),
        PolarGroupSpec(order=6, name="D3", orientable=True),
    )
    report = pi_consistency(data, develop(data))
    assert any("unique" in m for _, m in report.entries)
