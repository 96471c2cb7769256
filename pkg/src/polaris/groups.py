"""Groups marking chamber strata: closed subtori of T^n held as exact
integer lattices, and named compact groups backed by a catalog of declared
facts.

A subtorus is identified with the saturation of the integer span of its
generator rows, stored in Hermite normal form so that equality of
subgroups is a plain comparison.  Named groups (SO(3), Sp(2)Sp(1), ...)
carry no internal structure here; the catalog records, as axioms, which
quotients are spheres, which pairs act with cohomogeneity one on a sphere
and with what dihedral order, and which subgroups generate which.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from . import lattice

ALLOWED_WEYL_ORDERS = (2, 3, 4, 6)

CATALOG_ENV_VAR = "POLARIS_CATALOG"


class GroupError(ValueError):
    pass


class TorusSubgroup:
    """A closed connected subgroup of T^n, encoded by an integer lattice.

    ``generators`` are rows of an integer matrix; the subgroup is the
    subtorus whose Lie algebra is their rational span.  The canonical
    ``basis`` is the HNF basis of the saturation; ``raw_basis`` and
    ``span_index`` retain the plain span for tests that are sensitive to
    it (a product of circles is direct exactly when the index is 1).
    """

    def __init__(self, ambient_rank, generators):
        self.ambient_rank = int(ambient_rank)
        gens = tuple(tuple(int(x) for x in v) for v in generators)
        for v in gens:
            if len(v) != self.ambient_rank:
                raise GroupError(f"generator {v} does not have length {self.ambient_rank}")
        self.generators = gens
        span = lattice.lattice_span(gens, self.ambient_rank)
        self.basis = span.basis
        self.raw_basis = span.raw_basis
        self.rank = span.rank
        self.span_index = span.index

    def __eq__(self, other):
        return (
            isinstance(other, TorusSubgroup)
            and self.ambient_rank == other.ambient_rank
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_rank, self.basis))

    def __repr__(self):
        if self.rank == 0:
            return f"TorusSubgroup(trivial in T^{self.ambient_rank})"
        return f"TorusSubgroup({list(map(list, self.basis))} in T^{self.ambient_rank})"

    @property
    def dim(self):
        return self.rank

    def is_full(self):
        return self.basis == lattice.full_lattice(self.ambient_rank)

    def contains(self, other: "TorusSubgroup") -> bool:
        if self.ambient_rank != other.ambient_rank:
            raise GroupError("ambient rank mismatch")
        return lattice.contains(self.basis, other.basis) if other.rank else True

    def slope(self):
        """The primitive generator of a 1-dimensional subgroup."""
        if self.rank != 1:
            raise GroupError("slope is defined for circles only")
        return self.basis[0]


def trivial_group(ambient_rank):
    return TorusSubgroup(ambient_rank, ())


def circle(ambient_rank, v):
    return TorusSubgroup(ambient_rank, (v,))


def full_torus(ambient_rank):
    return TorusSubgroup(ambient_rank, lattice.full_lattice(ambient_rank))


@dataclass(frozen=True)
class NamedGroup:
    """Reference to a catalog entry by name."""

    name: str

    def __repr__(self):
        return f"NamedGroup({self.name!r})"


def group_to_json(g):
    if isinstance(g, TorusSubgroup):
        return {"torus": {"rank": g.ambient_rank, "generators": [list(v) for v in g.basis]}}
    if isinstance(g, NamedGroup):
        return {"named": g.name}
    raise GroupError(f"not a group reference: {g!r}")


def group_from_json(obj):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise GroupError(f"malformed group reference: {obj!r}")
    if "torus" in obj:
        t = obj["torus"]
        return TorusSubgroup(t["rank"], t["generators"])
    if "named" in obj:
        return NamedGroup(obj["named"])
    raise GroupError(f"malformed group reference: {obj!r}")


class TorusHom:
    """A homomorphism T^n -> T^r, i.e. an integer r x n matrix.

    The matrix acts on column vectors: a circle exp(t v) in T^n maps to
    exp(t M v) in T^r.
    """

    def __init__(self, source_rank, target_rank, matrix):
        self.source_rank = int(source_rank)
        self.target_rank = int(target_rank)
        rows = tuple(tuple(int(x) for x in row) for row in matrix)
        if len(rows) != self.target_rank or any(len(r) != self.source_rank for r in rows):
            raise GroupError("hom matrix shape mismatch")
        self.matrix = rows

    def __eq__(self, other):
        return (
            isinstance(other, TorusHom)
            and self.source_rank == other.source_rank
            and self.target_rank == other.target_rank
            and self.matrix == other.matrix
        )

    def __repr__(self):
        return f"TorusHom({self.source_rank}->{self.target_rank}, {list(map(list, self.matrix))})"

    def apply(self, v):
        if len(v) != self.source_rank:
            raise GroupError("vector length mismatch")
        return tuple(sum(r[j] * int(v[j]) for j in range(self.source_rank)) for r in self.matrix)

    @classmethod
    def identity(cls, n):
        return cls(n, n, lattice.full_lattice(n))

    @classmethod
    def zero(cls, n, r):
        return cls(n, r, tuple(tuple(0 for _ in range(n)) for _ in range(r)))


def restrict_hom(phi: TorusHom, sub: TorusSubgroup) -> TorusHom:
    """Restriction of ``phi`` to a subtorus, on the subgroup's own lattice.

    The i-th basis vector of ``sub`` maps to ``phi(basis_i)``, so the
    result is a hom from T^rank(sub) to the target.  Restriction is
    functorial: restricting along a chain equals restricting once.
    """
    if sub.ambient_rank != phi.source_rank:
        raise GroupError(
            f"rank mismatch: hom source T^{phi.source_rank}, subgroup of T^{sub.ambient_rank}"
        )
    cols = [phi.apply(b) for b in sub.basis]
    matrix = tuple(tuple(col[i] for col in cols) for i in range(phi.target_rank))
    return TorusHom(sub.rank, phi.target_rank, matrix)


# -- named-group catalog ----------------------------------------------------


@dataclass(frozen=True)
class SubgroupDecl:
    subgroup: str
    quotient_is_sphere: bool
    sphere_dim: int = -1


@dataclass(frozen=True)
class Coh1Decl:
    pair: tuple  # pair of subgroup names, order-insensitive
    weyl_order: int


@dataclass(frozen=True)
class GenerationDecl:
    generators: tuple  # set of subgroup names
    generated: str


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dim: int
    subgroups: tuple = ()
    coh1: tuple = ()
    generation: tuple = ()


@dataclass
class CatalogReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def add(self, entry, where, message):
        self.violations.append((entry, where, message))

    def __str__(self):
        if self.valid:
            return "catalog valid"
        return "\n".join(f"{e}[{w}]: {m}" for e, w, m in self.violations)


class Catalog:
    """A set of named-group entries with declared, checkable facts."""

    def __init__(self, entries):
        self.entries = {}
        for e in entries:
            if e.name in self.entries:
                raise GroupError(f"duplicate catalog entry {e.name!r}")
            self.entries[e.name] = e

    def __contains__(self, name):
        return name in self.entries

    def resolve(self, name) -> CatalogEntry:
        try:
            return self.entries[name]
        except KeyError:
            raise GroupError(f"unresolved group name {name!r}") from None

    def dim(self, name):
        return self.resolve(name).dim

    def declares_subgroup(self, name, sub):
        return any(d.subgroup == sub for d in self.resolve(name).subgroups)

    def sphere_dim(self, name, sub):
        """Declared dimension of name/sub if declared to be a sphere, else None."""
        for d in self.resolve(name).subgroups:
            if d.subgroup == sub and d.quotient_is_sphere:
                return d.sphere_dim
        return None

    def coh1_order(self, name, a, b):
        """Declared Weyl order of the (a, b) cohomogeneity-one pair in entry name."""
        key = frozenset((a, b))
        for d in self.resolve(name).coh1:
            if frozenset(d.pair) == key:
                return d.weyl_order
        return None

    def generates(self, name, parts):
        key = frozenset(parts)
        return any(
            frozenset(d.generators) == key and d.generated == name
            for d in self.resolve(name).generation
        )


def validate_catalog(entries) -> CatalogReport:
    """Internal consistency of a list of catalog entries.

    Checks that every referenced name resolves, that declared sphere
    dimensions match the dimension arithmetic dim(K) - dim(H), and that
    every declared Weyl order lies in {2, 3, 4, 6}.  Duplicate entry
    names raise.
    """
    catalog = Catalog(entries)  # raises on duplicates
    report = CatalogReport()
    for e in entries:
        for i, d in enumerate(e.subgroups):
            if d.subgroup not in catalog:
                report.add(e.name, f"subgroups[{i}]", f"unresolved name {d.subgroup!r}")
                continue
            if d.quotient_is_sphere:
                diff = e.dim - catalog.dim(d.subgroup)
                if diff != d.sphere_dim:
                    report.add(
                        e.name,
                        f"subgroups[{i}]",
                        f"sphere_dim {d.sphere_dim} != dim({e.name}) - dim({d.subgroup}) = {diff}",
                    )
        for i, d in enumerate(e.coh1):
            for nm in d.pair:
                if nm not in catalog:
                    report.add(e.name, f"coh1[{i}]", f"unresolved name {nm!r}")
            if d.weyl_order not in ALLOWED_WEYL_ORDERS:
                report.add(e.name, f"coh1[{i}]", f"order {d.weyl_order} not in {{2,3,4,6}}")
        for i, d in enumerate(e.generation):
            for nm in d.generators:
                if nm not in catalog:
                    report.add(e.name, f"generation[{i}]", f"unresolved name {nm!r}")
            if d.generated not in catalog:
                report.add(e.name, f"generation[{i}]", f"unresolved name {d.generated!r}")
    return report


def catalog_to_json(entries):
    return [
        {
            "name": e.name,
            "dim": e.dim,
            "subgroups": [[d.subgroup, d.quotient_is_sphere, d.sphere_dim] for d in e.subgroups],
            "coh1": [[list(d.pair), d.weyl_order] for d in e.coh1],
            "generation": [[sorted(d.generators), d.generated] for d in e.generation],
        }
        for e in entries
    ]


def catalog_from_json(obj):
    entries = []
    for item in obj:
        entries.append(
            CatalogEntry(
                name=item["name"],
                dim=int(item["dim"]),
                subgroups=tuple(
                    SubgroupDecl(s[0], bool(s[1]), int(s[2])) for s in item.get("subgroups", ())
                ),
                coh1=tuple(Coh1Decl(tuple(c[0]), int(c[1])) for c in item.get("coh1", ())),
                generation=tuple(
                    GenerationDecl(tuple(g[0]), g[1]) for g in item.get("generation", ())
                ),
            )
        )
    return entries


def load_catalog(path=None) -> Catalog:
    """Load a catalog from ``path``, the POLARIS_CATALOG env var, or the
    bundled default."""
    if path is None:
        path = os.environ.get(CATALOG_ENV_VAR)
    if path is None:
        from importlib.resources import files

        text = files("polaris.data").joinpath("default_catalog.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    entries = catalog_from_json(json.loads(text))
    report = validate_catalog(entries)
    if not report.valid:
        raise GroupError(f"invalid catalog:\n{report}")
    return Catalog(entries)
