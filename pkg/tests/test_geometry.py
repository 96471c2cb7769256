"""Model-space primitives: geodesics, reflections, walls, dedup."""

import math

import numpy as np
import pytest

from polaris.geometry import (
    EUCLIDEAN,
    HYPERBOLIC,
    MODELS,
    SPHERICAL,
    QuantizedIndex,
    angle_between,
    base_point,
    crossing_times,
    direction,
    distance,
    from_chart,
    geodesic,
    geodesic_tangent,
    isometry_defect,
    mdot,
    normalize_point,
    point_segment_distance,
    reflection_matrix,
    tangent_frame,
    wall_covector,
)

RNG = np.random.default_rng(42)


def random_point(model):
    xy = RNG.uniform(-0.8, 0.8, size=2)
    anchor = base_point(model)
    frame = tangent_frame(model, anchor)
    return from_chart(model, anchor, frame, xy)


@pytest.mark.parametrize("model", MODELS)
def test_geodesic_distance_consistency(model):
    for _ in range(20):
        x, y = random_point(model), random_point(model)
        d = distance(model, x, y)
        if d < 1e-9:
            continue
        u = direction(model, x, y)
        z = geodesic(model, x, u, d)
        assert distance(model, z, y) < 1e-7


@pytest.mark.parametrize("model", MODELS)
def test_reflection_is_involutive_isometry(model):
    for _ in range(20):
        a, b = random_point(model), random_point(model)
        if distance(model, a, b) < 1e-6:
            continue
        r = reflection_matrix(model, a, b)
        assert isometry_defect(model, r) < 1e-12
        assert np.abs(r @ r - np.eye(3)).max() < 1e-12
        # fixes the wall pointwise
        assert np.abs(r @ a - a).max() < 1e-12
        assert np.abs(r @ b - b).max() < 1e-12
        # preserves distances
        x, y = random_point(model), random_point(model)
        assert abs(distance(model, r @ x, r @ y) - distance(model, x, y)) < 1e-10


@pytest.mark.parametrize("model", MODELS)
def test_wall_covector_vanishes_on_wall(model):
    a, b = random_point(model), random_point(model)
    w = wall_covector(model, a, b)
    mid = geodesic(model, a, direction(model, a, b), 0.5 * distance(model, a, b))
    assert abs(np.dot(mid, w)) < 1e-12


@pytest.mark.parametrize("model", MODELS)
def test_crossing_times_locate_walls(model):
    for _ in range(20):
        a, b = random_point(model), random_point(model)
        x = random_point(model)
        if min(distance(model, a, b), abs(np.dot(x, wall_covector(model, a, b)))) < 1e-6:
            continue
        w = wall_covector(model, a, b)
        theta = RNG.uniform(0, 2 * math.pi)
        e1, e2 = tangent_frame(model, x)
        u = math.cos(theta) * e1 + math.sin(theta) * e2
        for t in crossing_times(model, x, u, w, 5.0):
            z = geodesic(model, x, u, t)
            assert abs(np.dot(z, w)) < 1e-9


def test_spherical_crossings_repeat_with_period_pi():
    x = normalize_point(SPHERICAL, [0.3, 0.1, 1.0])
    e1, e2 = tangent_frame(SPHERICAL, x)
    w = wall_covector(SPHERICAL, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    times = crossing_times(SPHERICAL, x, e1, w, 10.0)
    assert len(times) >= 3
    gaps = np.diff(times)
    assert np.allclose(gaps, math.pi, atol=1e-12)


@pytest.mark.parametrize("model", MODELS)
def test_point_segment_distance(model):
    a, b = random_point(model), random_point(model)
    if distance(model, a, b) < 1e-6:
        return
    u = direction(model, a, b)
    length = distance(model, a, b)
    mid = geodesic(model, a, u, length / 2)
    assert point_segment_distance(model, mid, a, b) < 1e-7
    # endpoints dominate when the foot lies outside the segment
    beyond = geodesic(model, a, u, length + 0.5)
    d = point_segment_distance(model, beyond, a, b)
    assert abs(d - distance(model, beyond, b)) < 1e-9


def test_hyperboloid_points_stay_on_sheet():
    for _ in range(10):
        x = random_point(HYPERBOLIC)
        assert abs(mdot(x, x) + 1.0) < 1e-12
        assert x[2] > 0


def test_right_angle_measure():
    x = base_point(EUCLIDEAN)
    e1, e2 = tangent_frame(EUCLIDEAN, x)
    assert abs(angle_between(EUCLIDEAN, x, e1, e2) - math.pi / 2) < 1e-12


@pytest.mark.parametrize("model", MODELS)
def test_geodesic_tangent_is_unit(model):
    x = random_point(model)
    e1, _ = tangent_frame(model, x)
    for t in (0.0, 0.4, 1.3):
        u = geodesic_tangent(model, x, e1, t)
        g = geodesic(model, x, e1, np.array(t))
        from polaris.geometry import tangent_dot

        assert abs(tangent_dot(model, g, u, u) - 1.0) < 1e-10


def test_quantized_index_merges_close_vectors():
    idx = QuantizedIndex(cell=1e-5, tol=1e-9)
    i0, new0 = idx.insert((0.1, 0.2, 0.3))
    i1, new1 = idx.insert((0.1 + 2e-10, 0.2 - 3e-10, 0.3))
    assert new0 and not new1 and i0 == i1
    # straddling a cell boundary still merges
    b = 7 * 1e-5
    j0, _ = idx.insert((b - 1e-12, 0.0, 0.0))
    j1, created = idx.insert((b + 1e-12, 0.0, 0.0))
    assert not created and j0 == j1
    # well-separated vectors never merge
    k0, created0 = idx.insert((0.5, 0.5, 0.5))
    k1, created1 = idx.insert((0.5001, 0.5, 0.5))
    assert created0 and created1 and k0 != k1
