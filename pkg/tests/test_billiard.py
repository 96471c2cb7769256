"""Billiard enumeration, the shooting oracle, Morse series and growth."""

import math

import numpy as np
import pytest

from polaris import corpus
from polaris.billiard import (
    BilliardConfig,
    BilliardError,
    TileBudgetError,
    growth_classify,
    morse_index,
    morse_series,
    shooting_oracle,
    unfold_enumerate,
)

SQUARE = corpus.torus_square(0)
HEXAGON = corpus.torus_hexagon()
TRIANGLE = corpus.su6_cp14()


def cfg(data=SQUARE, p=(0.3, 0.4), q=(0.6, 0.2), l_max=4.0, **kw):
    kw.setdefault("codims", 3)
    return BilliardConfig(data=data, p=p, q=q, l_max=l_max, **kw)


def as_dict(result):
    return {t.word: t.length for t in result.trajectories}


# -- enumeration basics ---------------------------------------------------------


def test_square_short_enumeration_frozen():
    # p = q generic in the unit square: the direct path plus one bounce
    # off each wall; the two diagonal double bounces hit corners exactly
    config = cfg(p=(0.3, 0.4), q=(0.3, 0.4), l_max=1.5)
    res = unfold_enumerate(config)
    expected = {
        (): 0.0,
        ("s4",): 0.6,
        ("s1",): 0.8,
        ("s3",): 1.2,
        ("s2",): 1.4,
    }
    got = as_dict(res)
    assert set(got) == set(expected)
    for w, l in expected.items():
        assert got[w] == pytest.approx(l, abs=1e-12)
    assert res.rejected_near_corner == 2


def test_interval_enumeration_hand_counted():
    # circle of circumference 2 pi, interval [0, pi], p = 0.8, q = 2.3:
    # images of q at 2 pi k +- 2.3
    config = BilliardConfig(data=corpus.circle_on_cp1(), p=(0.8,), q=(2.3,), l_max=8.0, codims=4)
    res = unfold_enumerate(config)
    got = as_dict(res)
    expected = {
        (): 1.5,  # 2.3 - 0.8
        ("minus",): 3.1,  # to -2.3
        ("plus",): 3.18,  # to 2 pi - 2.3 ~ 3.98
        ("minus", "plus"): 2 * math.pi - 2.3 + 0.8,  # to -(2 pi - 2.3)
        ("plus", "minus"): 2 * math.pi + 2.3 - 0.8,  # to 2 pi + 2.3
    }
    assert set(got) == set(expected)
    assert got[()] == pytest.approx(1.5)
    assert got[("minus",)] == pytest.approx(3.1)
    assert got[("plus",)] == pytest.approx(2 * math.pi - 2.3 - 0.8)


def test_canonical_order():
    res = unfold_enumerate(cfg())
    pairs = [(t.length, t.word) for t in res.trajectories]
    assert pairs == sorted(pairs, key=lambda x: (x[0], len(x[1]), x[1]))


def test_nongeneric_points_rejected():
    with pytest.raises(BilliardError, match="non-generic"):
        cfg(p=(0.3, 1e-9))
    with pytest.raises(BilliardError, match="outside"):
        cfg(p=(1.5, 0.5))


def test_codimension_validation():
    with pytest.raises(BilliardError, match="codimension"):
        cfg(codims=1)
    config = cfg(codims={"s1": 2, "s2": 3, "s3": 4, "s4": 6})
    assert config.codim_map["s3"] == 4


def test_tile_budget_raises():
    with pytest.raises(TileBudgetError, match="budget"):
        unfold_enumerate(cfg(data=HEXAGON, p=(0.2, 0.1), q=(-0.3, 0.25), l_max=9.0, max_tiles=100))


def test_reversibility():
    a = unfold_enumerate(cfg(p=(0.3, 0.4), q=(0.6, 0.2)))
    b = unfold_enumerate(cfg(p=(0.6, 0.2), q=(0.3, 0.4)))
    fwd = {t.word: (t.length, t.index) for t in a.trajectories}
    rev = {tuple(reversed(t.word)): (t.length, t.index) for t in b.trajectories}
    assert set(fwd) == set(rev)
    for w in fwd:
        assert fwd[w][0] == pytest.approx(rev[w][0], abs=1e-9)
        assert fwd[w][1] == rev[w][1]


def test_cumulative_counts_monotone():
    res = unfold_enumerate(cfg(l_max=6.0))
    ser = morse_series(res, cfg(l_max=6.0))
    ns = ser.sample(np.linspace(0.5, 6.0, 12))
    assert all(x <= y for x, y in zip(ns, ns[1:]))


# -- Morse indices ----------------------------------------------------------------


def test_empty_word_index_zero():
    config = cfg()
    assert morse_index((), 0.7, config) == 0


def test_flat_crossing_rule():
    # uniform codimension n: b crossings give index b (n - 1)
    config = cfg(codims=5)
    assert morse_index(("s1", "s2", "s3"), 2.0, config) == 3 * 4


def test_spherical_interval_indices():
    # three bounces, total length below pi: no conjugate contributions
    config = BilliardConfig(
        data=corpus.circle_on_cp1(), p=(0.3,), q=(0.4,), l_max=9.0, codims=4, nu=2
    )
    assert morse_index(("plus", "minus", "plus"), 2.9, config) == 3 * 3
    # each interior multiple of pi adds nu on spherical sections
    assert morse_index((), 3.5, config) == 2
    assert morse_index(("minus",), 2 * math.pi + 0.1, config) == 3 + 2 * 2


def test_index_recomputable_from_word():
    config = cfg(l_max=5.0)
    res = unfold_enumerate(config)
    for t in res.trajectories:
        assert t.index == morse_index(t.word, t.length, config)


# -- Morse series -----------------------------------------------------------------


def test_lacunary_square_uniform_codim_three():
    config = cfg(l_max=8.0, codims=3)
    ser = morse_series(unfold_enumerate(config), config)
    assert ser.lacunary
    assert all(k % 2 == 0 for k in ser.counts)
    assert ser.counts_are == "betti"


def test_mixed_codims_not_lacunary():
    config = cfg(l_max=6.0, codims={"s1": 2, "s2": 3, "s3": 2, "s4": 3})
    ser = morse_series(unfold_enumerate(config), config)
    assert not ser.lacunary
    assert ser.counts_are == "lower-bound"


def test_empty_series():
    config = cfg(p=(0.5, 0.5), q=(0.52, 0.5), l_max=0.01)
    ser = morse_series(unfold_enumerate(config), config)
    assert ser.counts == {}
    assert not ser.lacunary
    assert ser.cumulative(0.01) == 0


# -- growth classification -----------------------------------------------------------


def test_growth_flat_square_quadratic():
    config = cfg(p=(0.31, 0.43), q=(0.57, 0.22), l_max=30.0)
    ser = morse_series(unfold_enumerate(config), config)
    fit = growth_classify(ser, 8, 30)
    assert fit.kind == "polynomial"
    assert fit.degree == pytest.approx(2.0, abs=0.3)
    # independent count: unfolded images of q have unit density in the plane
    assert ser.cumulative(30.0) == pytest.approx(math.pi * 30**2, rel=0.1)


def test_growth_interval_linear():
    config = BilliardConfig(
        data=corpus.circle_on_cp1(), p=(0.8,), q=(2.3,), l_max=60.0, codims=3
    )
    ser = morse_series(unfold_enumerate(config), config)
    fit = growth_classify(ser, 10, 60)
    assert fit.kind == "polynomial"
    assert fit.degree == pytest.approx(1.0, abs=0.3)


def test_growth_hexagon_exponential():
    # feasible depth; the count doubles per unit length (volume entropy 1)
    config = cfg(data=HEXAGON, p=(0.21, 0.13), q=(-0.29, 0.27), l_max=9.5)
    ser = morse_series(unfold_enumerate(config), config)
    fit = growth_classify(ser, 4, 9.5)
    assert fit.kind == "exponential"
    assert fit.rate > 0.5


def test_growth_needs_samples():
    # every sample below the shortest trajectory length counts zero
    config = cfg(l_max=1.0, p=(0.3, 0.4), q=(0.6, 0.2))
    ser = morse_series(unfold_enumerate(config), config)
    with pytest.raises(BilliardError, match="too few"):
        growth_classify(ser, 0.01, 0.2, samples=12)


# -- oracle agreement ------------------------------------------------------------------


@pytest.mark.parametrize(
    "data,p,q",
    [
        (SQUARE, (0.3, 0.4), (0.6, 0.2)),
        (HEXAGON, (0.2, 0.1), (-0.3, 0.25)),
        (TRIANGLE, (0.05, 0.1), (-0.08, 0.04)),
    ],
    ids=["flat-square", "hyperbolic-hexagon", "spherical-triangle"],
)
def test_oracle_matches_enumerator(data, p, q):
    config = cfg(data=data, p=p, q=q, l_max=5.0)
    enu = as_dict(unfold_enumerate(config))
    orc = as_dict(shooting_oracle(config, grid=512))
    assert set(enu) == set(orc)
    for w in enu:
        assert enu[w] == pytest.approx(orc[w], abs=1e-6)


def test_oracle_subset_when_grid_coarse():
    config = cfg(data=HEXAGON, p=(0.2, 0.1), q=(-0.3, 0.25), l_max=5.0)
    enu = as_dict(unfold_enumerate(config))
    orc = as_dict(shooting_oracle(config, grid=16))
    assert set(orc) <= set(enu)


def test_oracle_interval():
    config = BilliardConfig(data=corpus.circle_on_cp1(), p=(0.8,), q=(2.3,), l_max=8.0, codims=4)
    enu = as_dict(unfold_enumerate(config))
    orc = as_dict(shooting_oracle(config))
    assert set(enu) == set(orc)
    for w in enu:
        assert enu[w] == pytest.approx(orc[w], abs=1e-9)


def test_spherical_wraps_present():
    # arcs longer than one revolution appear with winding words
    config = cfg(data=TRIANGLE, p=(0.05, 0.1), q=(-0.08, 0.04), l_max=7.5)
    res = unfold_enumerate(config)
    assert max(t.length for t in res.trajectories) > 2 * math.pi
    # conjugate points contribute to indices beyond arc length pi
    long_ones = [t for t in res.trajectories if t.length > math.pi]
    assert long_ones
    base = sum(config.codim_map[s] - 1 for s in long_ones[0].word)
    assert long_ones[0].index > base - 1  # nu contributions counted
