"""Integer lattice arithmetic against an independent sympy oracle."""

import random
from math import gcd

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from polaris.lattice import (
    SpanResult,
    contains,
    coords_in,
    det2,
    full_lattice,
    hnf,
    is_primitive,
    lattice_span,
    smith_diagonal,
)


def oracle_invariant_factors(rows, n):
    """Nonzero diagonal of the Smith normal form, via sympy."""
    m = sympy.Matrix(rows)
    s = smith_normal_form(m)
    diag = [abs(s[i, i]) for i in range(min(s.shape))]
    return [int(d) for d in diag if d != 0]


def random_unimodular(rng, n=2):
    """Product of random elementary matrices, det = +-1 exactly."""
    m = sympy.eye(n)
    for _ in range(8):
        i, j = rng.sample(range(n), 2)
        e = sympy.eye(n)
        e[i, j] = rng.randint(-3, 3)
        m = m * e
        if rng.random() < 0.3:
            p = sympy.eye(n)
            p[i, i] = -1
            m = m * p
    assert abs(m.det()) == 1
    return [[int(m[i, j]) for j in range(n)] for i in range(n)]


def test_standard_basis_spans_z2():
    res = lattice_span([(0, 1), (1, 0)], 2)
    assert res.rank == 2
    assert res.index == 1
    assert res.basis == full_lattice(2)


@pytest.mark.parametrize("k", range(-6, 7))
def test_unimodular_pair_spans_z2(k):
    # oracle: |det| = 1 forces the span to be all of Z^2
    assert abs(det2((1, 0), (k, 1))) == 1
    res = lattice_span([(1, 0), (k, 1)], 2)
    assert res.rank == 2
    assert res.index == 1
    assert res.basis == full_lattice(2)


def test_index_two_sublattice():
    # oracle: sympy Smith form of [[2,0],[0,1]] has diagonal (1,2)
    assert oracle_invariant_factors([[2, 0], [0, 1]], 2) == [1, 2]
    res = lattice_span([(2, 0), (0, 1)], 2)
    assert res.rank == 2
    assert res.index == 2
    assert res.basis == full_lattice(2)
    assert res.raw_basis == ((1, 0), (0, 2)) or res.raw_basis == ((2, 0), (0, 1))


def test_empty_input_is_rank_zero():
    res = lattice_span([], 2)
    assert res == SpanResult(rank=0, basis=(), raw_basis=(), index=1)


def test_primitivity():
    assert is_primitive((1, 0))
    assert not is_primitive((2, 4))
    # oracle: Euclid
    assert gcd(3, 5) == 1
    assert is_primitive((3, 5))
    with pytest.raises(ValueError, match="degenerate slope"):
        is_primitive((0, 0))


def test_span_is_idempotent_and_order_invariant():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.choice([2, 3])
        vecs = [tuple(rng.randint(-4, 4) for _ in range(n)) for _ in range(rng.randint(1, 4))]
        res = lattice_span(vecs, n)
        shuffled = vecs[:]
        rng.shuffle(shuffled)
        assert lattice_span(shuffled, n).basis == res.basis
        if res.rank:
            assert lattice_span(res.basis, n).basis == res.basis
            assert lattice_span(res.basis, n).index == 1


def test_random_unimodular_rows_span_z2():
    rng = random.Random(11)
    for _ in range(40):
        m = random_unimodular(rng)
        res = lattice_span(m, 2)
        assert res.basis == full_lattice(2)
        assert res.index == 1


def test_smith_diagonal_matches_sympy():
    rng = random.Random(3)
    for _ in range(40):
        rows = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(rng.randint(1, 3))]
        if not any(any(r) for r in rows):
            continue
        assert smith_diagonal(rows, 3) == oracle_invariant_factors(rows, 3)


def test_span_index_matches_sympy_invariant_factors():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.choice([2, 3])
        rows = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(rng.randint(1, n))]
        if not any(any(r) for r in rows):
            continue
        facs = oracle_invariant_factors(rows, n)
        res = lattice_span(rows, n)
        assert res.rank == len(facs)
        prod = 1
        for f in facs:
            prod *= f
        assert res.index == prod


def test_membership_and_coords():
    basis = hnf([(2, 0), (0, 1)], 2)
    assert coords_in(basis, (4, 3)) is not None
    assert coords_in(basis, (1, 0)) is None
    assert contains(full_lattice(2), [(5, -7), (0, 0)])
    c = coords_in(hnf([(1, 2), (0, 5)], 2), (2, 9))
    assert c == [2, 1]
