"""Boundary weight data for torus actions on simply connected manifolds
two dimensions higher, and the diffeomorphism classification in rank 2.

A weight sequence is the cyclic list of primitive circle slopes along the
boundary of the 2-disk orbit space.  Legality means each adjacent pair
spans a saturated rank-2 sublattice (the corner torus is the direct
product of the two circles).  For rank 2 the sequence can be normalized
so all adjacent determinants are +1 (up to the sign obstruction, see
``validate_sequence``); in the normalized state the self-intersection
numbers e_i of the invariant spheres satisfy

    v_{i-1} + v_{i+1} = -e_i v_i

exactly over the integers, and the cyclic intersection matrix Q with
diagonal e_i and off-diagonal 1's has rank k - 2.  Its signature and
parity decide among S^4, connected sums of S^2 x S^2 and of +-CP^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import lattice
from .lattice import det2
from .polar_data import Chamber, Corner, GroupGraph, PolarData, PolarGroupSpec, Side
from .groups import TorusSubgroup, circle, full_torus, trivial_group


class SequenceError(ValueError):
    pass


@dataclass(frozen=True)
class WeightSequence:
    rank: int
    vectors: tuple  # cyclic tuple of integer vectors
    normalized: bool = False

    def __post_init__(self):
        vecs = tuple(tuple(int(x) for x in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if len(vecs) < 2:
            raise SequenceError("a weight sequence needs at least two vectors")
        for v in vecs:
            if len(v) != self.rank:
                raise SequenceError(f"vector {v} does not have length {self.rank}")

    @property
    def k(self):
        return len(self.vectors)

    def pairs(self):
        v = self.vectors
        return [(v[i], v[(i + 1) % self.k]) for i in range(self.k)]


def sequence_to_json(seq: WeightSequence):
    return [list(v) for v in seq.vectors]


def sequence_from_json(obj, rank=None) -> WeightSequence:
    vecs = [tuple(int(x) for x in v) for v in obj]
    if rank is None:
        rank = len(vecs[0]) if vecs else 2
    return WeightSequence(rank=rank, vectors=tuple(vecs))


@dataclass
class SequenceReport:
    problems: list = field(default_factory=list)

    def add(self, where, message):
        self.problems.append((where, message))

    @property
    def valid(self):
        return not self.problems

    def __str__(self):
        if self.valid:
            return "legal weight sequence"
        return "\n".join(f"{w}: {m}" for w, m in self.problems)


def validate_sequence(seq: WeightSequence) -> SequenceReport:
    """Legality of a weight sequence.

    Per-vector primitivity; per cyclic pair, a saturated rank-2 span.
    For rank 2 and k >= 3 additionally the sign condition: the product of
    the adjacent determinant signs must be +1, otherwise no choice of
    slope signs makes all determinants +1 and the normalized-state
    machinery (and hence the classification) does not apply.
    """
    report = SequenceReport()
    for i, v in enumerate(seq.vectors):
        if not any(v):
            report.add(f"vector {i}", "zero vector")
            continue
        if not lattice.is_primitive(v):
            report.add(f"vector {i}", f"{v} is not primitive")
    if not report.valid:
        return report
    for i, (a, b) in enumerate(seq.pairs()):
        if seq.k == 2 and i == 1:
            break  # one unordered adjacent pair only
        span = lattice.lattice_span([a, b], seq.rank)
        if span.rank != 2:
            report.add(f"pair ({i},{(i + 1) % seq.k})", f"{a}, {b} span rank {span.rank}, need 2")
        elif span.index != 1:
            report.add(
                f"pair ({i},{(i + 1) % seq.k})",
                f"{a}, {b} span a sublattice of index {span.index}; the corner torus "
                "is not the direct product of the two circles",
            )
    if not report.valid:
        return report
    if seq.rank == 2 and seq.k >= 3:
        sign = 1
        for a, b in seq.pairs():
            sign *= 1 if det2(a, b) > 0 else -1
        if sign != 1:
            report.add(
                "cycle",
                "sign obstruction: the product of adjacent determinant signs is -1, "
                "so the sequence admits no +1-normalization",
            )
    return report


def _require_valid(seq):
    report = validate_sequence(seq)
    if not report.valid:
        raise SequenceError(str(report))


def normalize(seq: WeightSequence) -> WeightSequence:
    """Canonical representative under torus automorphisms, rotation and
    reflection of the orbit disk, and slope sign flips (rank 2 only).

    The canonical form starts with the standard basis (1,0), (0,1) and is
    the lexicographic minimum over all rotations and both traversal
    directions, each gauged back to the standard basis by the unique
    integer matrix sending its first two vectors there.  Equality of
    canonical forms is equivalence of the actions.
    """
    if seq.rank != 2:
        raise NotImplementedError("canonical forms are implemented for rank 2 only")
    _require_valid(seq)
    if seq.k == 2:
        return WeightSequence(2, ((1, 0), (0, 1)), normalized=True)
    signed = _sign_normalize(seq.vectors)
    best = None
    for direction in (1, -1):
        cycle = signed if direction == 1 else tuple(reversed(signed))
        for r in range(seq.k):
            rot = cycle[r:] + cycle[:r]
            gauged = _gauge_to_standard(rot)
            if best is None or gauged < best:
                best = gauged
    return WeightSequence(2, best, normalized=True)


def _sign_normalize(vectors):
    """Flip slope signs so every adjacent determinant is +1."""
    k = len(vectors)
    signs = [1] * k
    for i in range(k - 1):
        d = det2(vectors[i], vectors[i + 1]) * signs[i]
        signs[i + 1] = 1 if d > 0 else -1
    out = tuple(tuple(s * x for x in v) for s, v in zip(signs, vectors))
    for a, b in zip(out, out[1:] + out[:1]):
        assert det2(a, b) == 1, "sign normalization failed; sequence obstructed"
    return out


def _gauge_to_standard(cycle):
    """Apply the integer matrix taking the first two vectors to the
    standard basis; preserves all adjacent determinants up to its det."""
    a, b = cycle[0], cycle[1]
    d = det2(a, b)
    # inverse of the matrix with columns a, b (applied to column vectors)
    inv = ((b[1], -b[0]), (-a[1], a[0]))
    if d < 0:
        inv = tuple(tuple(-x for x in row) for row in inv)
    out = []
    for v in cycle:
        out.append((inv[0][0] * v[0] + inv[0][1] * v[1], inv[1][0] * v[0] + inv[1][1] * v[1]))
    assert out[0] == (1, 0) and out[1] == (0, 1)
    return tuple(out)


@dataclass(frozen=True)
class SelfIntersections:
    values: tuple

    def __iter__(self):
        return iter(self.values)


def self_intersections(seq: WeightSequence) -> SelfIntersections:
    """Self-intersection numbers of the invariant spheres over the edges,
    from v_{i-1} + v_{i+1} = -e_i v_i; requires normalized rank-2 input."""
    if seq.rank != 2:
        raise SequenceError("self-intersections are defined for rank 2")
    if not seq.normalized:
        raise SequenceError("self-intersections need a normalized sequence; call normalize() first")
    v = seq.vectors
    k = seq.k
    out = []
    for i in range(k):
        s = tuple(v[(i - 1) % k][j] + v[(i + 1) % k][j] for j in range(2))
        # s = -e v_i for an integer e
        cand = None
        for j in range(2):
            if v[i][j] != 0:
                if s[j] % v[i][j] != 0:
                    raise SequenceError(f"relation violated at edge {i}: {s} not a multiple of {v[i]}")
                cand = -s[j] // v[i][j]
                break
        for j in range(2):
            if s[j] != -cand * v[i][j]:
                raise SequenceError(f"relation violated at edge {i}: {s} != {-cand} * {v[i]}")
        out.append(cand)
    return SelfIntersections(tuple(out))


def rational_signature(rows):
    """(positive, negative, zero) inertia of a symmetric integer matrix,
    by exact congruence diagonalization over the rationals."""
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    pos = neg = zero = 0
    live = list(range(n))
    while live:
        # find a nonzero diagonal entry among the live indices
        p = next((i for i in live if a[i][i] != 0), None)
        if p is None:
            od = next(
                ((i, j) for i in live for j in live if i != j and a[i][j] != 0),
                None,
            )
            if od is None:
                zero += len(live)
                break
            i, j = od
            # a_ii = a_jj = 0, a_ij != 0: add row/col j to i to expose a pivot
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            p = i
        d = a[p][p]
        if d > 0:
            pos += 1
        else:
            neg += 1
        live.remove(p)
        for i in live:
            f = a[i][p] / d
            if f:
                for t in range(n):
                    a[i][t] -= f * a[p][t]
                for t in range(n):
                    a[t][i] -= f * a[t][p]
    return pos, neg, zero


@dataclass(frozen=True)
class Classification4:
    """Diffeomorphism type of the rank-2 total space: S^4, #m(S^2 x S^2)
    or #p CP^2 # q (-CP^2)."""

    b2: int
    parity: str  # 'even' | 'odd'
    signature: int
    kind: str  # human-readable type

    def __str__(self):
        return self.kind


def classify4(seq: WeightSequence) -> Classification4:
    """Classify the 4-manifold of a legal rank-2 weight sequence.

    k = 2 gives the 4-sphere.  Otherwise the cyclic intersection matrix of
    the invariant spheres must have rank k - 2; its signature and the
    parity of the diagonal determine the connected-sum type.
    """
    if seq.rank != 2:
        raise SequenceError("classification implemented for rank 2")
    norm = seq if seq.normalized else normalize(seq)
    k = norm.k
    if k == 2:
        return Classification4(b2=0, parity="even", signature=0, kind="S^4")
    e = list(self_intersections(norm))
    q = [[0] * k for _ in range(k)]
    for i in range(k):
        q[i][i] = e[i]
        q[i][(i + 1) % k] += 1
        q[(i + 1) % k][i] += 1
    pos, neg, zero = rational_signature(q)
    if pos + neg != k - 2:
        raise SequenceError(
            f"internal consistency: intersection matrix rank {pos + neg}, expected {k - 2} "
            "(bad normalization)"
        )
    sigma = pos - neg
    parity = "even" if all(x % 2 == 0 for x in e) else "odd"
    b2 = k - 2
    if b2 == 0:
        kind = "S^4"
    elif parity == "even":
        if sigma != 0:
            raise SequenceError("even intersection form with nonzero signature is impossible here")
        m = b2 // 2
        kind = "S^2xS^2" if m == 1 else f"#{m}(S^2xS^2)"
    else:
        p = (b2 + sigma) // 2
        qn = (b2 - sigma) // 2
        if p < 0 or qn < 0 or (b2 + sigma) % 2 != 0:
            raise SequenceError("signature incompatible with b2")
        parts = []
        if p:
            parts.append("CP^2" if p == 1 else f"#{p}(CP^2)")
        if qn:
            parts.append("-CP^2" if qn == 1 else f"#{qn}(-CP^2)")
        kind = " # ".join(parts)
    return Classification4(b2=b2, parity=parity, signature=sigma, kind=kind)


def euler_characteristic(seq: WeightSequence) -> int:
    """Euler characteristic of the total manifold: the number of corners
    of the orbit disk (each a torus fixed point), in any rank."""
    _require_valid(seq)
    return seq.k


def polar_data_from_sequence(seq: WeightSequence) -> PolarData:
    """Marked-chamber data of the polar structure carried by a legal
    weight sequence: a right-angled k-gon whose curvature follows from
    the angle sum, sides marked by the slope circles, corners by the
    span of adjacent pairs, trivial principal group.

    The polar group is derived exactly: it is generated by the unique
    involutions of the side circles, i.e. by the slopes halved, giving
    the F_2-span of the slopes (order 2^rank).
    """
    _require_valid(seq)
    n = seq.rank
    k = seq.k
    chamber = Chamber(
        dimension=2,
        sides=tuple(Side(f"s{i+1}", 1.0) for i in range(k)),
        corners=tuple(Corner(f"c{i+1}", 2) for i in range(k)),
    )
    faces = {f"s{i+1}": circle(n, v) for i, v in enumerate(seq.vectors)}
    corners = {}
    for i in range(k):
        a = seq.vectors[(i - 1) % k]
        b = seq.vectors[i]
        span = lattice.lattice_span([a, b], n)
        corners[f"c{i+1}"] = TorusSubgroup(n, span.basis)
    from .polar_data import _f2_rank

    order = 2 ** _f2_rank([tuple(x % 2 for x in v) for v in seq.vectors], n)
    graph = GroupGraph(principal=trivial_group(n), face_marks=faces, corner_marks=corners)
    return PolarData(chamber, graph, PolarGroupSpec(order=order, name=f"Z2^{order.bit_length()-1}"))


def weight_sequence_from_data(data: PolarData) -> WeightSequence:
    """Extract the cyclic slope sequence from torus-marked chamber data."""
    if data.chamber.dimension != 2:
        raise SequenceError("weight sequences come from 2-dimensional chambers")
    vecs = []
    for s in data.chamber.sides:
        g = data.graph.face_marks[s.id]
        if not isinstance(g, TorusSubgroup) or g.rank != 1:
            raise SequenceError(f"side {s.id!r} is not marked by a circle subtorus")
        vecs.append(g.slope())
    return WeightSequence(rank=vecs[0].__len__(), vectors=tuple(vecs))
