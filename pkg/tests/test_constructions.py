"""Surgery, connected sums, bundle lifts, quotient/cover descriptors."""

import math

import pytest

from polaris import corpus
from polaris.constructions import (
    ChamberSymmetry,
    ConstructionError,
    CutArc,
    ExceptionalDescriptor,
    MarkedSymmetry,
    QuotientDescriptor,
    bundle_lift,
    connected_sum_fixed_points,
    corner_truncation,
    cover_expand,
    cross_cut,
    forget_lift,
    glue,
    lift_freeness_report,
    point_cut,
    quotient_descriptor,
)
from polaris.coxeter import section_invariants
from polaris.groups import TorusHom, TorusSubgroup, circle, full_torus, load_catalog
from polaris.lattice import det2
from polaris.polar_data import chamber_geometry, data_to_dict, validate
from polaris.torus_actions import classify4, validate_sequence, weight_sequence_from_data


def diagram(data):
    """Chamber + graph dict, without the polar-group metadata."""
    d = data_to_dict(data)
    d.pop("pi", None)
    return d


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


# -- corner gluing ------------------------------------------------------------------


def test_two_squares_glue_to_right_angled_hexagon(catalog):
    a = corpus.torus_square(2)
    b = corpus.torus_square(2)
    out = connected_sum_fixed_points(a, "c2", b, "c2")
    assert out.chamber.k == 6
    assert all(c.order == 2 for c in out.chamber.corners)
    geom = chamber_geometry(out.chamber)
    assert geom.kappa == -1 and geom.area_over_pi == 1
    assert validate(out, catalog).valid
    # derived polar group and genus-2 section
    assert out.declared_pi.order == 4
    slopes = [out.graph.face_marks[s.id].slope() for s in out.chamber.sides]
    ref = [s.slope() for s in (corpus.torus_hexagon(2).graph.face_marks[f"s{i+1}"] for i in range(6))]
    assert slopes == ref
    inv = section_invariants(out)
    assert inv.chi == -2


def test_hexagon_chi_is_additive(catalog):
    # chi(glued) = chi(A) + chi(B) - 2 with flat squares contributing 0
    out = connected_sum_fixed_points(corpus.torus_square(0), "c2", corpus.torus_square(0), "c2")
    inv = section_invariants(out)
    assert inv.chi == 0 + 0 - 2


def test_mismatched_corner_groups_rejected(catalog):
    a = corpus.torus_square(2)
    b = corpus.so3_su3so3()
    with pytest.raises(ConstructionError, match="corner marks differ"):
        connected_sum_fixed_points(a, "c2", b, "top")


def test_inequivalent_angle_orders_rejected(catalog):
    # make two chambers with equal corner marks but different orders
    a = corpus.so3_su3so3()  # corner order 3, mark SO(3)
    b = corpus.so4_m8()  # corner 'br' order 3 but adjacent marks differ
    with pytest.raises(ConstructionError):
        connected_sum_fixed_points(a, "top", b, "top")  # 'top' of b has order 6


def test_named_triangles_sum_to_hyperbolic_quadrilateral(catalog):
    a = corpus.so3_su3so3()
    out = connected_sum_fixed_points(a, "top", corpus.so3_su3so3(), "top", catalog=catalog)
    assert out.chamber.k == 4
    assert {c.order for c in out.chamber.corners} == {3}
    assert chamber_geometry(out.chamber).kappa == -1
    assert validate(out, catalog).valid


def test_cp2_pair_sum_classifies_additively(catalog):
    out = connected_sum_fixed_points(corpus.cp2_fan(), "c2", corpus.cp2_fan(), "c2")
    assert validate(out, catalog).valid
    seq = weight_sequence_from_data(out)
    assert validate_sequence(seq).valid
    c = classify4(seq)
    assert c.b2 == 1 + 1
    assert c.signature == 0
    assert c.kind == "CP^2 # -CP^2"


def test_square_plus_cp2_adds_b2(catalog):
    a = corpus.torus_square(2)  # S^2 x S^2
    b = corpus.cp2_fan()
    out = connected_sum_fixed_points(a, "c1", b, "c2")
    seq = weight_sequence_from_data(out)
    c = classify4(seq)
    assert c.b2 == 2 + 1
    assert abs(c.signature) == 1 and c.parity == "odd"


def test_spin_square_pair_is_sign_obstructed(catalog):
    # the glued data is valid chamber data, but its weight sequence is
    # outside the normalizable class and the classifier must refuse it
    out = connected_sum_fixed_points(corpus.torus_square(2), "c2", corpus.torus_square(2), "c2")
    assert validate(out, catalog).valid
    report = validate_sequence(weight_sequence_from_data(out))
    assert not report.valid


# -- cross cuts and 1D gluing -----------------------------------------------------------


def test_interval_surgery_reproduces_interval():
    a = corpus.circle_on_cp1()
    b = corpus.circle_on_cp1()
    out = glue(a, point_cut(0.8, keep="minus"), b, point_cut(0.7, keep="plus"))
    assert out.chamber.dimension == 1
    assert out.chamber.length == pytest.approx(0.8 + (math.pi - 0.7))
    assert out.graph.face_marks["minus"] == full_torus(1)
    assert out.graph.face_marks["plus"] == full_torus(1)
    assert out.declared_pi.order == 2


def test_cross_cut_squares_glue_to_rectangle(catalog):
    a = corpus.torus_square(0)
    b = corpus.torus_square(0)
    # cut both squares between the opposite sides s2 and s4
    out = glue(a, cross_cut("s2", 0.5, "s4", 0.5), b, cross_cut("s2", 0.5, "s4", 0.5))
    assert out.chamber.k == 4
    assert chamber_geometry(out.chamber).kappa == 0
    assert validate(out, catalog).valid


def test_bad_truncation_radius_rejected():
    a = corpus.torus_square(2)
    with pytest.raises(ConstructionError, match="radius"):
        glue(a, corner_truncation("c2", 5.0), a, corner_truncation("c2", 5.0))


# -- bundle lifts -----------------------------------------------------------------------


def test_hopf_lift_gives_standard_s3_diagram():
    data = corpus.circle_on_cp1()
    lifted = bundle_lift(data, 1, corpus.hopf_lift_homs())
    assert lifted.graph.face_marks["minus"] == circle(2, (1, 1))
    assert lifted.graph.face_marks["plus"] == circle(2, (0, 1))
    # the endpoint circles span Z^2 with determinant +-1: the 3-sphere diagram
    d = det2(lifted.graph.face_marks["minus"].slope(), lifted.graph.face_marks["plus"].slope())
    assert abs(d) == 1
    assert lifted.declared_pi.order == 4
    ref = corpus.t2_s3_interval()
    assert diagram(lifted) == diagram(ref)


def test_forget_inverts_lift():
    data = corpus.circle_on_cp1()
    lifted = bundle_lift(data, 1, corpus.hopf_lift_homs())
    back = forget_lift(lifted, 1)
    assert diagram(back) == diagram(data)


def test_trivial_homs_give_product(catalog):
    data = corpus.torus_square(1)
    homs = {v: TorusHom.zero(2, 1) for v in data.vertices()}
    lifted = bundle_lift(data, 1, homs)
    for s in data.chamber.sides:
        v = data.graph.face_marks[s.id].slope()
        assert lifted.graph.face_marks[s.id] == circle(3, (0,) + v)
    assert diagram(forget_lift(lifted, 1)) == diagram(data)
    assert validate(lifted, catalog).valid


def test_incompatible_restriction_names_the_arrow():
    data = corpus.torus_square(1)
    homs = {v: TorusHom.zero(2, 1) for v in data.vertices()}
    homs["c1"] = TorusHom(2, 1, [(0, 1)])  # restricts nontrivially to side s1
    with pytest.raises(ConstructionError, match=r"arrow s1 -> c1"):
        bundle_lift(data, 1, homs)


def test_lift_freeness_report():
    lifted = bundle_lift(corpus.circle_on_cp1(), 1, corpus.hopf_lift_homs())
    assert all(ok for _, ok in lift_freeness_report(lifted, 1))


def test_lift_2d_square_with_compatible_homs(catalog):
    data = corpus.torus_square(2)
    phi = TorusHom(2, 1, [(1, 1)])  # one global hom restricts compatibly everywhere
    homs = {v: phi for v in data.vertices()}
    lifted = bundle_lift(data, 1, homs)
    assert validate(lifted, catalog).valid
    assert lifted.graph.face_marks["s1"] == circle(3, (1, 0, 1))
    assert diagram(forget_lift(lifted, 1)) == diagram(data)


# -- quotients and covers ------------------------------------------------------------------


def z3_rotation():
    return MarkedSymmetry(
        ChamberSymmetry(rotation=1, flip=False),
        witness=(("O''(2)", "O'(2)"), ("O'(2)", "O(2)"), ("O(2)", "O''(2)")),
    )


def test_z3_quotient_descriptor_round_trip():
    data = corpus.so3_su3so3()
    desc = quotient_descriptor(data, [z3_rotation()], "Z3", normal_in_pi=True)
    assert len(desc.elements) == 3
    assert desc.pi_label == "D3.Z3"
    assert sorted(map(len, desc.side_orbits)) == [3]
    assert sorted(map(len, desc.corner_orbits)) == [3]
    back = cover_expand(desc)
    assert data_to_dict(back) == data_to_dict(data)


def test_z2_quotient_rejected_by_normality():
    data = corpus.so3_su3so3()
    flip = MarkedSymmetry(
        ChamberSymmetry(rotation=0, flip=True),
        witness=(("O'(2)", "O(2)"), ("O(2)", "O'(2)")),
    )
    with pytest.raises(ConstructionError, match="not normal"):
        quotient_descriptor(data, [flip], "Z2", normal_in_pi=False)


def test_trivial_quotient_is_identity():
    data = corpus.so3_su3so3()
    desc = quotient_descriptor(data, [], "trivial", normal_in_pi=True)
    assert len(desc.elements) == 1
    assert cover_expand(desc) is data


def test_bad_witness_rejected():
    data = corpus.so3_su3so3()
    wrong = MarkedSymmetry(ChamberSymmetry(rotation=1, flip=False), witness=())
    with pytest.raises(ConstructionError, match="witness"):
        quotient_descriptor(data, [wrong], "Z3", normal_in_pi=True)


def test_symmetry_must_preserve_angles():
    data = corpus.so4_m8()  # orders (6, 6, 3) admit no rotation
    rot = MarkedSymmetry(
        ChamberSymmetry(rotation=1, flip=False),
        witness=(("O''(2)", "O'(2)"), ("O'(2)", "O(2)"), ("O(2)", "O''(2)"),
                 ("SO(4)", "SO(3)"), ("SO(3)", "SO(4)")),
    )
    with pytest.raises(ConstructionError, match="angle orders|witness"):
        quotient_descriptor(data, [rot], "Z3", normal_in_pi=True)


def test_exceptional_descriptor_pass_through():
    desc = QuotientDescriptor(
        base=None,
        group_name="pi1",
        normal_in_pi=True,
        exceptional=ExceptionalDescriptor(
            coset_space="G/H", section="Sigma", polar_group="Gamma"
        ),
    )
    out = cover_expand(desc)
    assert isinstance(out, ExceptionalDescriptor)
    assert out.coset_space == "G/H"
