"""Geodesic billiards in a realized chamber: complete enumeration by
unfolding, Morse indices from orbit-type codimensions, counting series,
and growth classification.

Enumeration is target-driven: the reflection tiling is grown breadth
first out to the length bound (with exact distance pruning), every tile
contributes one candidate endpoint (the tile's copy of the target point),
and each candidate geodesic is verified by tracing its wall crossings in
order through the tiling, rejecting any trajectory that passes within the
corner tolerance of a vertex.  On the sphere the development is finite
and candidates carry winding numbers instead.

The shooting oracle is an independent in-chamber route: rays from the
start point are folded at the walls, the direction circle is split
adaptively into maximal constant-bounce-word windows (each such window is
an interval), and inside every window the signed offset of the target
from the ray is monotone, so each sign change is refined by bisection to
a trajectory.  Used only for cross-checking the enumerator.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .coxeter import CLOSED_FINITE, Realization, develop, realize_chamber
from .polar_data import PolarData

DEFAULT_DELTA = 1e-6
TRACE_EPS = 1e-11


class BilliardError(ValueError):
    pass


class TileBudgetError(BilliardError):
    """The tiling budget was exhausted before reaching the length bound."""


@dataclass
class BilliardConfig:
    """Start/target points (chart coordinates at the chamber anchor),
    length bound, per-side orbit-type codimensions (each >= 2), the
    conjugate-point multiplicity for spherical sections, and the corner
    rejection tolerance."""

    data: PolarData
    p: tuple
    q: tuple
    l_max: float
    codims: dict | int = 2
    nu: int = 1
    delta: float = DEFAULT_DELTA
    max_tiles: int = 300_000

    def __post_init__(self):
        self.realization = realize_chamber(self.data.chamber)
        r = self.realization
        if r.dimension == 1:
            self.p_point = float(self.p[0]) if hasattr(self.p, "__len__") else float(self.p)
            self.q_point = float(self.q[0]) if hasattr(self.q, "__len__") else float(self.q)
            length = self.data.chamber.length
            for name, val in (("p", self.p_point), ("q", self.q_point)):
                if not self.delta < val < length - self.delta:
                    raise BilliardError(f"{name} is non-generic: within delta of a wall")
        else:
            self.p_point = r.point(self.p)
            self.q_point = r.point(self.q)
            for name, x in (("p", self.p_point), ("q", self.q_point)):
                if not r.contains(x, margin=0.0):
                    raise BilliardError(f"{name} lies outside the chamber")
                for w in r.walls:
                    if abs(float(np.dot(x, w.covector))) < self.delta:
                        raise BilliardError(f"{name} is non-generic: within delta of a wall")
        if r.dimension == 2:
            self.p_frame = geo.tangent_frame(r.model, self.p_point)
        side_ids = self.data.chamber.face_ids()
        if isinstance(self.codims, int):
            self.codim_map = {s: self.codims for s in side_ids}
        else:
            self.codim_map = dict(self.codims)
        for s in side_ids:
            c = self.codim_map.get(s)
            if c is None or c < 2:
                raise BilliardError(f"side {s!r} needs a codimension >= 2, got {c}")

    @property
    def kappa(self):
        return self.realization.kappa


@dataclass(frozen=True)
class BilliardTrajectory:
    word: tuple  # side ids crossed, in order
    length: float
    index: int

    def sort_key(self):
        return (self.length, len(self.word), self.word)


@dataclass
class EnumerationResult:
    trajectories: list
    rejected_near_corner: int = 0
    rejected_other: int = 0
    tiles_visited: int = 0

    def words(self):
        return [t.word for t in self.trajectories]

    def lengths(self):
        return np.array([t.length for t in self.trajectories])


def morse_index(word, length, config: BilliardConfig) -> int:
    """Each wall crossing contributes (codimension - 1); on spherical
    sections every interior arc-length multiple of pi adds nu."""
    idx = sum(config.codim_map[s] - 1 for s in word)
    if config.kappa == 1 and length > math.pi:
        idx += config.nu * int((length - 1e-12) / math.pi)
    return idx


def _finish(config, found, rejected_corner, rejected_other, tiles):
    out = []
    for word, length in found:
        out.append(BilliardTrajectory(tuple(word), float(length), morse_index(word, length, config)))
    out.sort(key=BilliardTrajectory.sort_key)
    return EnumerationResult(
        trajectories=out,
        rejected_near_corner=rejected_corner,
        rejected_other=rejected_other,
        tiles_visited=tiles,
    )


# -- 1-dimensional chambers -----------------------------------------------------------


def _enumerate_interval(config: BilliardConfig) -> EnumerationResult:
    """Images of q on the unfolded line are 2Lk +- q; the word follows
    from the walls (integer multiples of L) crossed on the way."""
    L = config.data.chamber.length
    p, q = config.p_point, config.q_point
    found = []
    k_range = int(config.l_max / (2 * L)) + 2
    for k in range(-k_range, k_range + 1):
        for sgn in (1, -1):
            y = 2 * L * k + sgn * q
            ell = abs(y - p)
            if ell > config.l_max:
                continue
            word = _interval_word(p, y, L)
            found.append((word, ell))
    return _finish(config, found, 0, 0, 0)


def _interval_word(p, y, L):
    word = []
    if y > p:
        m = 1
        while m * L < y:
            if m * L > p:
                word.append("plus" if m % 2 == 1 else "minus")
            m += 1
    else:
        m = 0
        while m * L > y:
            if m * L < p:
                word.append("minus" if m % 2 == 0 else "plus")
            m -= 1
    return tuple(word)


# -- batched model helpers ---------------------------------------------------------------


def _foot_batch(model, a, u, X):
    """Foot parameters of the rows of X along the geodesic (a, u)."""
    if model == geo.EUCLIDEAN:
        return (X - a) @ u
    if model == geo.SPHERICAL:
        return np.mod(np.arctan2(X @ u, X @ a), 2 * math.pi)
    ca = geo.mdot(X, np.broadcast_to(a, X.shape))
    cu = geo.mdot(X, np.broadcast_to(u, X.shape))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(cu) < np.abs(ca), -cu / ca, 0.0)
        t = np.arctanh(ratio)
    t[np.abs(cu) >= np.abs(ca)] = np.copysign(50.0, (-cu * ca)[np.abs(cu) >= np.abs(ca)])
    return t


def _chamber_distance_batch(r: Realization, X):
    """Distance from each row of X to the chamber (0 when inside)."""
    model = r.model
    covs = np.array([w.covector for w in r.walls])
    dots = X @ covs.T
    inside = np.all(dots >= -1e-12, axis=1)
    dist = np.full(len(X), np.inf)
    dist[inside] = 0.0
    out = ~inside
    if np.any(out):
        Y = X[out]
        best = np.full(len(Y), np.inf)
        for w in r.walls:
            t = np.clip(_foot_batch(model, w.a, w.u, Y), 0.0, w.length)
            foot = geo.geodesic(model, w.a, w.u, t)
            best = np.minimum(best, geo.distance(model, Y, foot))
        dist[out] = best
    return dist


def _crossing_batch(model, A, B, remaining):
    """First positive zero of a cosh/cos/linear pencil f(t) = A g(t) + B h(t)
    with f(0) = A >= 0; returns +inf when there is none before `remaining`."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if model == geo.EUCLIDEAN:
            t = np.where(B < 0, -A / B, np.inf)
        elif model == geo.HYPERBOLIC:
            t = np.where(np.abs(B) > np.abs(A), np.arctanh(np.where(np.abs(B) > np.abs(A), -A / B, 0.0)), np.inf)
            t = np.where(t > 0, t, np.inf)
        else:
            t = np.mod(np.arctan2(-A, B), math.pi)
            t = np.where(t <= TRACE_EPS, t + math.pi, t)
    t = np.where(t > TRACE_EPS, t, np.inf)
    return np.where(t <= remaining, t, np.inf)


# -- the unfolding enumerator -------------------------------------------------------------


def _collect_tiles(config: BilliardConfig, bound: float):
    """Breadth-first closure of the tiling out to distance ``bound`` from
    p, in pulled-back coordinates.  Returns (G, HP): per tile the matrix
    g and the point g^{-1} p."""
    r = config.realization
    reflections = [w.reflection for w in r.walls]
    p = config.p_point
    index = geo.QuantizedIndex(cell=1e-5, tol=1e-9)
    index.insert(p)
    G = [np.eye(3)]
    HP = [p.copy()]
    frontier_g = np.array([np.eye(3)])
    frontier_hp = np.array([p])
    while len(frontier_g):
        cand_g = []
        cand_hp = []
        for Rm in reflections:
            cand_g.append(frontier_g @ Rm)
            cand_hp.append(frontier_hp @ Rm.T)
        cand_g = np.concatenate(cand_g)
        cand_hp = np.concatenate(cand_hp)
        dist = _chamber_distance_batch(r, cand_hp)
        keep = dist <= bound
        cand_g, cand_hp = cand_g[keep], cand_hp[keep]
        new_g, new_hp = [], []
        for g, hp in zip(cand_g, cand_hp):
            _, created = index.insert(hp)
            if created:
                new_g.append(g)
                new_hp.append(hp)
                if len(G) + len(new_g) > config.max_tiles:
                    raise TileBudgetError(
                        f"tile budget {config.max_tiles} exhausted at length bound {bound}: "
                        "the tiling grows exponentially; lower l_max or raise max_tiles"
                    )
        if not new_g:
            break
        G.extend(new_g)
        HP.extend(new_hp)
        frontier_g = np.array(new_g)
        frontier_hp = np.array(new_hp)
    return np.array(G), np.array(HP)


def _trace_batch(config: BilliardConfig, targets, lengths, dirs):
    """Trace straight geodesics from p through the tiling, folding at
    each wall, and record the bounce words.

    targets: (N, 3) unfolded endpoints pulled to the base frame step by
    step; lengths: (N,) total lengths; dirs: (N, 3) initial tangents.
    Returns (words, ok, min_clearance).
    """
    r = config.realization
    model = r.model
    N = len(targets)
    X = np.broadcast_to(config.p_point, (N, 3)).copy()
    U = dirs.copy()
    Y = targets.copy()
    remaining = lengths.copy()
    alive = np.ones(N, dtype=bool)
    ok = np.ones(N, dtype=bool)
    clear = np.full(N, np.inf)
    words = [[] for _ in range(N)]
    covs = np.array([w.covector for w in r.walls])
    refls = [w.reflection for w in r.walls]
    min_side = min((w.length for w in r.walls if w.length > 0), default=1.0)
    max_steps = 64 + int(6 * config.l_max / min_side)
    # hyperbolic targets inherit the tiling's accumulated float error,
    # which grows like cosh(l_max); genuine mismatches miss by O(inradius)
    end_tol = 1e-8 * (1.0 + math.cosh(config.l_max)) if model == geo.HYPERBOLIC else 1e-8
    for _ in range(max_steps):
        if not alive.any():
            break
        A = X @ covs.T  # (N, k)
        B = U @ covs.T
        T = _crossing_batch(model, A, B, remaining[:, None])
        T[~alive] = np.inf
        exit_t = T.min(axis=1)
        exit_j = T.argmin(axis=1)
        done = alive & ~np.isfinite(exit_t)
        if done.any():
            # endpoint inside the current tile: verify it coincides with q
            # (coordinate comparison; the metric cannot resolve below ~1e-7)
            end = geo.geodesic(model, X[done], U[done], remaining[done])
            if model != geo.EUCLIDEAN:
                end = geo.normalize_point(model, end)
            err = np.abs(end - Y[done]).max(axis=1) / np.maximum(
                1.0, np.abs(Y[done]).max(axis=1)
            )
            bad = err > end_tol
            idxs = np.nonzero(done)[0]
            ok[idxs[bad]] = False
            alive[done] = False
        cross = alive & np.isfinite(exit_t)
        if cross.any():
            idxs = np.nonzero(cross)[0]
            t = exit_t[cross]
            Z = geo.geodesic(model, X[cross], U[cross], t)
            Ut = geo.geodesic_tangent(model, X[cross], U[cross], t)
            for j, w in enumerate(r.walls):
                sel = exit_j[cross] == j
                if not sel.any():
                    continue
                rows = idxs[sel]
                zz = Z[sel]
                tw = _foot_batch(model, w.a, w.u, zz)
                cl = np.minimum(tw, w.length - tw) if w.length > 0 else np.zeros(len(zz))
                clear[rows] = np.minimum(clear[rows], cl)
                near = cl < config.delta
                ok[rows[near]] = False
                alive[rows[near]] = False
                Rm = refls[j]
                X[rows] = zz @ Rm.T
                U[rows] = Ut[sel] @ Rm.T
                Y[rows] = Y[rows] @ Rm.T
                for row in rows:
                    if alive[row]:
                        words[row].append(w.side_id)
            remaining[cross] -= t
            if model != geo.EUCLIDEAN:
                X[cross] = geo.normalize_point(model, X[cross])
            U[cross] = geo.orthonormalize_tangent(model, X[cross], U[cross])
    ok &= ~alive  # rays that never finished are not trajectories
    return words, ok, clear


def _enumerate_flat_hyperbolic(config: BilliardConfig) -> EnumerationResult:
    r = config.realization
    model = r.model
    p, q = config.p_point, config.q_point
    G, HP = _collect_tiles(config, config.l_max)
    lengths = geo.distance(model, HP, np.broadcast_to(q, HP.shape))
    keep = lengths <= config.l_max
    G, lengths = G[keep], lengths[keep]
    found = []
    rejected_corner = 0
    rejected_other = 0
    direct = lengths < 1e-12
    if np.any(direct):
        found.append(((), 0.0))
    sel = ~direct
    targets = np.einsum("nij,j->ni", G[sel], q)
    lens = lengths[sel]
    dirs = geo.direction(model, np.broadcast_to(p, targets.shape), targets)
    words, ok, clear = _trace_batch(config, targets, lens, dirs)
    for w, good, ell, cl in zip(words, ok, lens, clear):
        if good:
            found.append((tuple(w), float(ell)))
        elif cl < config.delta:
            rejected_corner += 1
        else:
            rejected_other += 1
    return _finish(config, found, rejected_corner, rejected_other, len(G))


def _enumerate_spherical(config: BilliardConfig) -> EnumerationResult:
    dev = develop(config.data.chamber)
    if dev.status != CLOSED_FINITE:
        raise BilliardError("spherical chamber failed to close its development")
    model = geo.SPHERICAL
    p, q = config.p_point, config.q_point
    targets, lens, dirs = [], [], []
    rejected_other = 0
    found = []
    for _, g in dev.elements:
        y = g @ q
        c = float(np.dot(p, y))
        if c > 1.0 - 1e-14:
            if config.l_max >= 0:
                found.append(((), 0.0))
            base_a = 0.0
            u0 = None
        elif c < -1.0 + 1e-14:
            rejected_other += 1  # antipodal target: non-generic configuration
            continue
        else:
            base_a = math.acos(max(-1.0, min(1.0, c)))
            u0 = geo.direction(model, p, y)
        if u0 is None:
            continue
        k = 0
        while True:
            ell1 = base_a + 2 * math.pi * k
            ell2 = (2 * math.pi - base_a) + 2 * math.pi * k
            any_added = False
            if 0 < ell1 <= config.l_max:
                targets.append(y), lens.append(ell1), dirs.append(u0)
                any_added = True
            if ell2 <= config.l_max:
                targets.append(y), lens.append(ell2), dirs.append(-u0)
                any_added = True
            if not any_added:
                break
            k += 1
    rejected_corner = 0
    if targets:
        words, ok, clear = _trace_batch(
            config, np.array(targets), np.array(lens), np.array(dirs)
        )
        for w, good, ell, cl in zip(words, ok, lens, clear):
            if good:
                found.append((tuple(w), float(ell)))
            elif cl < config.delta:
                rejected_corner += 1
            else:
                rejected_other += 1
    return _finish(config, found, rejected_corner, rejected_other, len(dev.elements))


def unfold_enumerate(config: BilliardConfig) -> EnumerationResult:
    """Complete list of billiard trajectories from p to the orbit of q of
    length at most l_max, in canonical (length, word) order.

    Trajectories passing within ``delta`` of a corner are rejected and
    counted in the result; perturbing p and q slightly recovers them.
    """
    if config.realization.dimension == 1:
        return _enumerate_interval(config)
    if config.kappa == 1:
        return _enumerate_spherical(config)
    return _enumerate_flat_hyperbolic(config)


# -- Morse series and growth ---------------------------------------------------------------


@dataclass
class MorseSeries:
    counts: dict  # index -> count
    lengths: np.ndarray  # sorted
    lacunary: bool
    gap: int | None
    counts_are: str  # 'betti' | 'lower-bound'

    def cumulative(self, L):
        """N(L): number of trajectories of length <= L."""
        return int(bisect_right(self.lengths.tolist(), L))

    def sample(self, l_values):
        return np.array([self.cumulative(L) for L in l_values], dtype=float)


def morse_series(result: EnumerationResult, config: BilliardConfig) -> MorseSeries:
    """Index histogram and cumulative counts.  When all indices fall in
    one residue class with gap >= 2 the lacunary flag is set and the
    counts are honest Betti numbers of the path space; otherwise they are
    lower bounds."""
    counts = Counter(t.index for t in result.trajectories)
    lengths = np.sort(result.lengths()) if result.trajectories else np.array([])
    keys = sorted(counts)
    if not keys:
        lacunary, gap = False, None
    elif len(keys) == 1:
        lacunary, gap = True, None
    else:
        g = 0
        for a, b in zip(keys, keys[1:]):
            g = math.gcd(g, b - a)
        lacunary, gap = g >= 2, g
    return MorseSeries(
        counts=dict(counts),
        lengths=lengths,
        lacunary=lacunary,
        gap=gap,
        counts_are="betti" if lacunary else "lower-bound",
    )


@dataclass
class GrowthFit:
    kind: str  # 'polynomial' | 'exponential'
    degree: float
    rate: float
    poly_residual: float
    exp_residual: float
    samples: list


def growth_classify(series: MorseSeries, l_min, l_max, samples=12) -> GrowthFit:
    """Least-squares comparison of log N against log L (polynomial) and
    against L (exponential); the smaller residual wins."""
    ls = np.linspace(l_min, l_max, samples)
    ns = series.sample(ls)
    good = ns > 0
    ls, ns = ls[good], ns[good]
    if len(ls) < 10:
        raise BilliardError(f"too few samples with nonzero counts: {len(ls)} < 10")
    logn = np.log(ns)
    def fit(x):
        coef, res = np.polyfit(x, logn, 1, full=True)[:2]
        rss = float(res[0]) if len(res) else 0.0
        return coef, rss
    (p_slope, _), p_rss = fit(np.log(ls))
    (e_slope, _), e_rss = fit(ls)
    kind = "polynomial" if p_rss <= e_rss else "exponential"
    return GrowthFit(
        kind=kind,
        degree=float(p_slope),
        rate=float(e_slope),
        poly_residual=p_rss,
        exp_residual=e_rss,
        samples=list(zip(ls.tolist(), ns.tolist())),
    )


# -- the shooting oracle ---------------------------------------------------------------------


_HASH_MULT = np.int64(1000003)


def _simulate(config: BilliardConfig, thetas, record=True, track=False):
    """Fold rays from p with the given directions through the chamber.

    Returns per-ray full-word signatures and, when ``record``, per-segment
    arrays (word-prefix hash, signed offset of the target from the ray's
    geodesic, foot parameter of the target, exit time and accumulated
    length at segment start).  ``track`` additionally records the bounce
    words and per-crossing corner clearances, for final verification.
    """
    r = config.realization
    model = r.model
    p, q = config.p_point, config.q_point
    N = len(thetas)
    e1, e2 = config.p_frame
    U = np.outer(np.cos(thetas), e1) + np.outer(np.sin(thetas), e2)
    X = np.broadcast_to(p, (N, 3)).copy()
    remaining = np.full(N, float(config.l_max))
    acc = np.zeros(N)
    alive = np.ones(N, dtype=bool)
    sig = np.zeros(N, dtype=np.int64)
    nseg = np.zeros(N, dtype=np.int64)
    covs = np.array([w.covector for w in r.walls])
    refls = [w.reflection for w in r.walls]
    min_side = min((w.length for w in r.walls if w.length > 0), default=1.0)
    max_steps = 64 + int(6 * config.l_max / min_side)
    segs = []
    words_arr = np.full((N, max_steps), -1, dtype=np.int16) if track else None
    clear_arr = np.full((N, max_steps), np.inf) if track else None
    for step in range(max_steps):
        if not alive.any():
            break
        A = X @ covs.T  # (N, k)
        B = U @ covs.T
        T = _crossing_batch(model, A, B, remaining[:, None])
        T[~alive] = np.inf
        exit_t = T.min(axis=1)
        exit_j = T.argmin(axis=1)
        exit_t_eff = np.where(np.isfinite(exit_t), exit_t, remaining)
        if record:
            offset, foot = _q_offset(model, X, U, q)
            segs.append(
                {
                    "hash": sig.copy(),
                    "offset": np.where(alive, offset, np.nan),
                    "foot": foot,
                    "t_end": np.where(alive, exit_t_eff, np.nan),
                    "acc": acc.copy(),
                }
            )
        ending = alive & ~np.isfinite(exit_t)
        alive = alive & ~ending
        cross = alive & np.isfinite(exit_t)
        if cross.any():
            idxs = np.nonzero(cross)[0]
            t = exit_t[cross]
            Z = geo.geodesic(model, X[cross], U[cross], t)
            Ut = geo.geodesic_tangent(model, X[cross], U[cross], t)
            acc[cross] += t
            remaining[cross] -= t
            nseg[cross] += 1
            for j, w in enumerate(r.walls):
                sel = exit_j[cross] == j
                if not sel.any():
                    continue
                rows = idxs[sel]
                zz = Z[sel]
                if track:
                    tw = _foot_batch(model, w.a, w.u, zz)
                    cl = np.minimum(tw, w.length - tw) if w.length > 0 else np.zeros(len(zz))
                    words_arr[rows, step] = j
                    clear_arr[rows, step] = cl
                Rm = refls[j]
                X[rows] = zz @ Rm.T
                U[rows] = Ut[sel] @ Rm.T
                sig[rows] = sig[rows] * _HASH_MULT + np.int64(j + 1)
            if model != geo.EUCLIDEAN:
                X[cross] = geo.normalize_point(model, X[cross])
            U[cross] = geo.orthonormalize_tangent(model, X[cross], U[cross])
    out = {"sig": sig * np.int64(31) + nseg, "segments": segs}
    if track:
        out["words"] = words_arr
        out["clear"] = clear_arr
    return out


def _q_offset(model, X, U, q):
    """Signed offset of q from each ray's geodesic and the foot parameter."""
    if model == geo.EUCLIDEAN:
        dq = q[None, :] - X
        offset = U[:, 0] * dq[:, 1] - U[:, 1] * dq[:, 0]
        foot = dq[:, 0] * U[:, 0] + dq[:, 1] * U[:, 1]
        return offset, foot
    n = np.cross(X, U)
    if model == geo.SPHERICAL:
        offset = n @ q
        foot = np.mod(np.arctan2(U @ q, X @ q), 2 * math.pi)
        return offset, foot
    # sinh of the signed distance to the ray plane: <q, J(x ^ u)>_J = q . (x ^ u)
    offset = n @ q
    ca = geo.mdot(X, np.broadcast_to(q, X.shape))
    cu = geo.mdot(U, np.broadcast_to(q, X.shape))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(cu) < np.abs(ca), -cu / ca, 0.0)
    foot = np.arctanh(ratio)
    foot[np.abs(cu) >= np.abs(ca)] = np.copysign(50.0, (-cu * ca)[np.abs(cu) >= np.abs(ca)])
    return offset, foot


def _split_floor(config):
    """Width below which an unresolved boundary sliver cannot hide an
    admissible trajectory: a window of width w only contains trajectories
    whose corner clearance is of order w times the metric magnification
    at range l_max, so anything hiding below delta-scale windows is
    corner-rejected anyway."""
    if config.realization.model == geo.HYPERBOLIC:
        scale = math.sinh(config.l_max) + 1.0
    else:
        scale = config.l_max + 1.0
    return max(1e-14, min(1e-6, 0.25 * config.delta / scale))


def _ray_target_gap(res):
    """Per ray, a lower bound for the distance from the traced geodesic to
    the orbit copies of the target: the minimum over segments of the
    distance to the segment's full geodesic."""
    gap = None
    for seg in res["segments"]:
        o = np.abs(seg["offset"])
        d = np.arcsinh(o) if True else o  # monotone lower bound in all models
        d = np.where(np.isfinite(d), d, np.inf)
        gap = d if gap is None else np.minimum(gap, d)
    if gap is None:
        return None
    return gap


def _split_windows(config, lo, hi, max_depth=64):
    """Split the intervals into maximal constant-word windows (plus
    boundary slivers below the split floor); flat-array breadth-first,
    with adjacent fragments of the same window merged afterwards.

    An interval whose endpoint rays both keep a distance from the target
    exceeding the width times the metric magnification sinh(l_max) cannot
    contain a hit and needs no further resolution.
    """
    floor = _split_floor(config)
    if config.realization.model == geo.HYPERBOLIC:
        mag = math.sinh(config.l_max) + 2.0
    else:
        mag = config.l_max + 2.0
    res_lo = _simulate(config, lo)
    res_hi = _simulate(config, hi)
    sig_lo, sig_hi = res_lo["sig"], res_hi["sig"]
    g_lo, g_hi = _ray_target_gap(res_lo), _ray_target_gap(res_hi)
    out = []
    cur = (lo, hi, sig_lo, sig_hi, g_lo, g_hi)
    for _ in range(max_depth):
        clo, chi, sa, sb, ga, gb = cur
        if len(clo) == 0:
            break
        width = chi - clo
        safe = np.minimum(ga, gb) > width * mag
        resolved = (sa == sb) | (width <= floor) | safe
        out.append((clo[resolved], chi[resolved], sa[resolved], sb[resolved]))
        keep = ~resolved
        clo, chi, sa, sb, ga, gb = (
            clo[keep], chi[keep], sa[keep], sb[keep], ga[keep], gb[keep]
        )
        if len(clo) == 0:
            break
        mid = (clo + chi) / 2
        rm = _simulate(config, mid)
        sm, gm = rm["sig"], _ray_target_gap(rm)
        cur = (
            np.concatenate([clo, mid]),
            np.concatenate([mid, chi]),
            np.concatenate([sa, sm]),
            np.concatenate([sm, sb]),
            np.concatenate([ga, gm]),
            np.concatenate([gm, gb]),
        )
    W_lo = np.concatenate([o[0] for o in out])
    W_hi = np.concatenate([o[1] for o in out])
    S_a = np.concatenate([o[2] for o in out])
    S_b = np.concatenate([o[3] for o in out])
    order = np.argsort(W_lo)
    W_lo, W_hi, S_a, S_b = W_lo[order], W_hi[order], S_a[order], S_b[order]
    # merge consecutive fragments of the same constant-word window
    same = S_a == S_b
    n = len(W_lo)
    if n == 0:
        return W_lo, W_hi
    start = np.ones(n, dtype=bool)
    cont = same[1:] & same[:-1] & (S_a[1:] == S_a[:-1])
    start[1:] = ~cont
    starts = np.flatnonzero(start)
    ends = np.append(starts[1:], n) - 1
    return W_lo[starts], W_hi[ends]


def _pluck(res, tseg, field, fallback=np.nan):
    segs = res["segments"]
    out = np.full(len(tseg), fallback)
    for s in np.unique(tseg):
        if s < len(segs):
            rows = tseg == s
            out[rows] = segs[int(s)][field][rows]
    return out


def _hits_in_intervals(config, lo, hi):
    """Offset zeros inside constant-word windows, located by bisection.
    Returns (theta, segment) pairs."""
    w_lo, w_hi = _split_windows(config, lo, hi)
    ra = _simulate(config, w_lo)
    rb = _simulate(config, w_hi)
    tlo, thi, tseg, slo, shash = [], [], [], [], []
    for s in range(min(len(ra["segments"]), len(rb["segments"]))):
        sa, sb = ra["segments"][s], rb["segments"][s]
        in_a = (sa["foot"] > -1e-9) & (sa["foot"] <= sa["t_end"] + 1e-9)
        in_b = (sb["foot"] > -1e-9) & (sb["foot"] <= sb["t_end"] + 1e-9)
        mask = (
            np.isfinite(sa["offset"])
            & np.isfinite(sb["offset"])
            & (sa["offset"] * sb["offset"] < 0)
            & (in_a | in_b)
            & (sa["hash"] == sb["hash"])
        )
        if mask.any():
            tlo.append(w_lo[mask])
            thi.append(w_hi[mask])
            tseg.append(np.full(int(mask.sum()), s, dtype=int))
            slo.append(sa["offset"][mask])
            shash.append(sa["hash"][mask])
    if not tlo:
        return np.array([]), np.array([], dtype=int)
    tlo = np.concatenate(tlo)
    thi = np.concatenate(thi)
    tseg = np.concatenate(tseg)
    slo = np.concatenate(slo)
    shash = np.concatenate(shash)
    # Illinois regula falsi on the per-window offset, with plain bisection
    # whenever the word changes at the probe (near window boundaries)
    ra2 = _simulate(config, tlo)
    rb2 = _simulate(config, thi)
    flo = _pluck(ra2, tseg, "offset")
    fhi = _pluck(rb2, tseg, "offset")
    active = np.ones(len(tlo), dtype=bool)
    last_side = np.zeros(len(tlo), dtype=np.int8)
    for _ in range(80):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        width = thi[idx] - tlo[idx]
        denom = fhi[idx] - flo[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(np.abs(denom) > 0, -flo[idx] / denom, 0.5)
        frac = np.clip(frac, 0.02, 0.98)
        mid = tlo[idx] + frac * width
        rm = _simulate(config, mid)
        om = _pluck(rm, tseg[idx], "offset")
        hm = _pluck(rm, tseg[idx], "hash", fallback=-1).astype(np.int64)
        bad = ~np.isfinite(om) | (hm != shash[idx])
        om = np.where(bad, np.nan, om)
        go_lo = (om * flo[idx] > 0) | bad  # root in the upper part
        rows_lo = idx[go_lo]
        rows_hi = idx[~go_lo]
        tlo[rows_lo] = mid[go_lo]
        flo[rows_lo] = np.where(bad[go_lo], flo[rows_lo], om[go_lo])
        # Illinois damping on the stagnant end
        fhi[rows_lo] = np.where(last_side[rows_lo] == 1, fhi[rows_lo] / 2, fhi[rows_lo])
        last_side[rows_lo] = 1
        thi[rows_hi] = mid[~go_lo]
        fhi[rows_hi] = om[~go_lo]
        flo[rows_hi] = np.where(last_side[rows_hi] == -1, flo[rows_hi] / 2, flo[rows_hi])
        last_side[rows_hi] = -1
        active[idx] = (thi[idx] - tlo[idx]) > 1e-13
    return (tlo + thi) / 2, tseg


def shooting_oracle(config: BilliardConfig, grid: int = 4096) -> EnumerationResult:
    """Find trajectories by direct in-chamber ray tracing.

    The direction circle is scanned at ``grid`` seeds, split adaptively
    into constant-word windows (each a theta interval), and every sign
    change of the target offset inside a window is refined by bisection.
    Best effort: too coarse a grid yields a subset of the enumerator's
    list, never a superset.
    """
    if config.realization.dimension == 1:
        return _oracle_interval(config)
    step = 2 * math.pi / grid
    thetas = (np.arange(grid) + 0.3819660113) * step
    theta_hits, seg_hits = _hits_in_intervals(config, thetas, thetas + step)
    found = {}
    rejected_corner = 0
    side_ids = [w.side_id for w in config.realization.walls]
    if len(theta_hits):
        res = _simulate(config, theta_hits, track=True)
        for i, (theta, s) in enumerate(zip(theta_hits, seg_hits)):
            if s >= len(res["segments"]):
                continue
            seg = res["segments"][s]
            off, foot = seg["offset"][i], seg["foot"][i]
            if not np.isfinite(off) or abs(off) > 1e-7:
                continue
            if not (-1e-9 < foot <= seg["t_end"][i] + 1e-9):
                continue
            length = float(seg["acc"][i] + foot)
            if length > config.l_max + 1e-9:
                continue
            if s > 0 and res["clear"][i, :s].min() < config.delta:
                rejected_corner += 1
                continue
            word = tuple(side_ids[j] for j in res["words"][i, :s] if j >= 0)
            if len(word) != s:
                continue
            key = (word, round(length * 1e7))
            found.setdefault(key, (word, length))
    if float(geo.distance(config.realization.model, config.p_point, config.q_point)) < 1e-12:
        found.setdefault(((), 0), ((), 0.0))
    return _finish(config, list(found.values()), rejected_corner, 0, 0)


def _oracle_interval(config: BilliardConfig) -> EnumerationResult:
    """1-dimensional shooting: simulate the two directions step by step."""
    L = config.data.chamber.length
    found = []
    for direction in (1.0, -1.0):
        x = config.p_point
        d = direction
        travelled = 0.0
        word = []
        for _ in range(int(config.l_max / L) + 3):
            # distance to q going in direction d before the next wall
            t_wall = (L - x) if d > 0 else x
            t_q = (config.q_point - x) * d
            if 0 <= t_q <= t_wall and travelled + t_q <= config.l_max:
                if travelled + t_q > 0:
                    found.append((tuple(word), travelled + t_q))
                elif config.p_point == config.q_point:
                    found.append(((), 0.0))
            travelled += t_wall
            if travelled > config.l_max:
                break
            word.append("plus" if d > 0 else "minus")
            x = L if d > 0 else 0.0
            d = -d
        # continue scanning repeatedly past q images on later bounces
    dedup = {}
    for w, l in found:
        dedup.setdefault((w, round(l, 9)), (w, l))
    return _finish(config, list(dedup.values()), 0, 0, 0)
