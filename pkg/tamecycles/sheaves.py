"""
Complexes of sheaves on finite posets.

A sheaf complex is a covariant functor from the poset to cochain complexes:
``F(x)`` is the value on the minimal open ``U_x`` and ``x <= y`` gives a
restriction ``F(x) -> F(y)``. Only restrictions along covering relations
need to be supplied; composites are computed and checked.
"""
import logging
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .complexes import (
    ChainMap,
    CochainComplex,
    concentrated,
    cone,
    cone_map,
    direct_sum,
    fiber,
    fiber_map,
    random_chain_map,
    random_complex,
    sum_maps,
    tensor,
    tensor_maps,
    zero_complex,
)
from .exceptions import NaturalityFailure, NotFunctorial, ShapeMismatch
from .linalg import PrimeField
from .posets import FinitePoset, MonotoneMap, OpenClosedDecomposition, product_poset
from .typing import CohomologyTable, Element

logger = logging.getLogger(__name__)

__all__ = [
    "SheafComplex",
    "SheafMap",
    "constant_sheaf",
    "unit_sheaf",
    "skyscraper",
    "point_injective",
    "up_constant",
    "pullback_sheaf",
    "pullback_map",
    "restrict",
    "shriek_extension",
    "closed_pushforward",
    "shriek_counit",
    "closed_unit",
    "sections",
    "sheaf_cone",
    "sheaf_cone_map",
    "sheaf_fiber",
    "sheaf_fiber_map",
    "sheaf_direct_sum",
    "external_tensor",
    "twist_sheaf",
    "random_sheaf",
]


class SheafComplex:
    def __init__(
        self,
        base: FinitePoset,
        stalks: Mapping[Element, CochainComplex],
        restrictions: Mapping[Tuple[Element, Element], ChainMap],
        check: bool = True,
    ) -> None:
        self.base = base
        self.stalks: Dict[Element, CochainComplex] = {x: stalks[x] for x in base}
        if not self.stalks:
            raise ShapeMismatch("A sheaf needs a field; use SheafComplex.zero")
        self.field: PrimeField = next(iter(self.stalks.values())).field
        self._given: Dict[Tuple[Element, Element], ChainMap] = {}
        for (x, y), rho in restrictions.items():
            if not base.leq(x, y):
                raise NotFunctorial(f"Restriction along {x!r} -> {y!r} is not a relation", (x, y))
            self._given[(x, y)] = rho
        self._cache: Dict[Tuple[Element, Element], ChainMap] = {}
        for x, y in base.covers:
            if (x, y) not in self._given:
                self._given[(x, y)] = ChainMap.zero(self.stalks[x], self.stalks[y])
                if check and self.stalks[x].total_dimension() and self.stalks[y].total_dimension():
                    raise NotFunctorial(f"Missing restriction along {x!r} -> {y!r}", (x, y))
        if check:
            self._validate()

    @classmethod
    def zero(cls, base: FinitePoset, field: PrimeField, twist: int = 0) -> "SheafComplex":
        stalks = {x: zero_complex(field, twist) for x in base}
        return cls(base, stalks, {}, check=False)

    def _validate(self) -> None:
        for (x, y), rho in self._given.items():
            if rho.source is not self.stalks[x] and rho.source != self.stalks[x]:
                raise ShapeMismatch(f"Restriction {x!r} -> {y!r} has the wrong source", (x, y))
            if rho.target is not self.stalks[y] and rho.target != self.stalks[y]:
                raise ShapeMismatch(f"Restriction {x!r} -> {y!r} has the wrong target", (x, y))
        P = self.base
        for x in P:
            for y in P.sorted(P.up(x)):
                if y == x:
                    continue
                expected = self.restriction(x, y)
                for a, z in P.covers:
                    if a != x or not P.leq(z, y):
                        continue
                    if self.restriction(z, y) @ self._given[(x, z)] != expected:
                        raise NotFunctorial(
                            f"Restrictions {x!r} -> {z!r} -> {y!r} do not compose",
                            (x, z, y),
                        )
                given = self._given.get((x, y))
                if given is not None and given != expected:
                    raise NotFunctorial(f"Restriction {x!r} -> {y!r} is not the composite", (x, y))

    def __repr__(self) -> str:
        return f"<SheafComplex on {self.base!r}>"

    def stalk(self, x: Element) -> CochainComplex:
        return self.stalks[x]

    __getitem__ = stalk

    def restriction(self, x: Element, y: Element) -> ChainMap:
        if x == y:
            return ChainMap.identity(self.stalks[x])
        key = (x, y)
        if key not in self._cache:
            P = self.base
            if not P.leq(x, y):
                raise NotFunctorial(f"{x!r} is not below {y!r}", key)
            for a, z in P.covers:
                if a == x and P.leq(z, y):
                    self._cache[key] = self.restriction(z, y) @ self._given[(x, z)]
                    break
        return self._cache[key]

    @property
    def twist(self) -> int:
        complexes = list(self.stalks.values())
        return next((c.twist for c in complexes if c.total_dimension()), complexes[0].twist)

    def stalk_table(self, x: Element) -> CohomologyTable:
        return self.stalks[x].cohomology_table()

    def stalk_tables(self) -> Dict[Element, CohomologyTable]:
        return {x: self.stalk_table(x) for x in self.base}

    def is_zero(self) -> bool:
        return all(c.total_dimension() == 0 for c in self.stalks.values())

    def is_acyclic(self) -> bool:
        return all(c.is_acyclic() for c in self.stalks.values())

    def covers(self) -> List[Tuple[Element, Element]]:
        return self.base.covers


class SheafMap:
    """
    A natural transformation of sheaf complexes: one chain map per point,
    commuting with restrictions along every covering relation.
    """

    def __init__(
        self,
        source: SheafComplex,
        target: SheafComplex,
        components: Mapping[Element, ChainMap],
        check: bool = True,
    ) -> None:
        self.source = source
        self.target = target
        self.components: Dict[Element, ChainMap] = {}
        for x in source.base:
            phi = components.get(x)
            if phi is None:
                phi = ChainMap.zero(source[x], target[x])
            self.components[x] = phi
        if check:
            for x, y in source.base.covers:
                left = target.restriction(x, y) @ self.components[x]
                right = self.components[y] @ source.restriction(x, y)
                if left != right:
                    raise NaturalityFailure(content=(x, y))

    def __repr__(self) -> str:
        return f"<SheafMap {self.source!r} -> {self.target!r}>"

    def __call__(self, x: Element) -> ChainMap:
        return self.components[x]

    @property
    def field(self) -> PrimeField:
        return self.source.field

    @classmethod
    def identity(cls, sheaf: SheafComplex) -> "SheafMap":
        return cls(sheaf, sheaf, {x: ChainMap.identity(sheaf[x]) for x in sheaf.base}, check=False)

    @classmethod
    def zero(cls, source: SheafComplex, target: SheafComplex) -> "SheafMap":
        return cls(source, target, {}, check=False)

    def __matmul__(self, other: "SheafMap") -> "SheafMap":
        return SheafMap(
            other.source,
            self.target,
            {x: self.components[x] @ other.components[x] for x in other.source.base},
            check=False,
        )

    def __add__(self, other: "SheafMap") -> "SheafMap":
        return SheafMap(
            self.source,
            self.target,
            {x: self.components[x] + other.components[x] for x in self.source.base},
            check=False,
        )

    def __sub__(self, other: "SheafMap") -> "SheafMap":
        return SheafMap(
            self.source,
            self.target,
            {x: self.components[x] - other.components[x] for x in self.source.base},
            check=False,
        )

    def scaled(self, c: int) -> "SheafMap":
        return SheafMap(
            self.source,
            self.target,
            {x: m.scaled(c) for x, m in self.components.items()},
            check=False,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SheafMap):
            return NotImplemented
        return all(self.components[x] == other.components[x] for x in self.source.base)

    __hash__ = None  # type: ignore

    def is_quasi_iso(self) -> bool:
        return all(phi.is_quasi_iso() for phi in self.components.values())

    def is_zero(self) -> bool:
        return all(phi.is_zero() for phi in self.components.values())


# ################################################################
# basic sheaves
# ################################################################


def constant_sheaf(base: FinitePoset, complex: CochainComplex) -> SheafComplex:
    stalks = {x: complex for x in base}
    return SheafComplex(
        base,
        stalks,
        {(x, y): ChainMap.identity(complex) for x, y in base.covers},
        check=False,
    )


def unit_sheaf(base: FinitePoset, field: PrimeField) -> SheafComplex:
    """
    The constant sheaf Λ.
    """
    return constant_sheaf(base, concentrated(field, 0, 1))


def _supported(base: FinitePoset, support: Iterable[Element], complex: CochainComplex) -> SheafComplex:
    """
    `complex` on `support`, zero elsewhere, identity restrictions inside.
    `support` must be locally closed so that these restrictions compose.
    """
    s = set(support)
    zero = zero_complex(complex.field, complex.twist)
    stalks = {x: complex if x in s else zero for x in base}
    restrictions = {
        (x, y): ChainMap.identity(complex) if x in s and y in s else ChainMap.zero(stalks[x], stalks[y])
        for x, y in base.covers
    }
    return SheafComplex(base, stalks, restrictions)


def skyscraper(base: FinitePoset, x: Element, complex: CochainComplex) -> SheafComplex:
    return _supported(base, [x], complex)


def point_injective(base: FinitePoset, x: Element, complex: CochainComplex) -> SheafComplex:
    """
    ``I_{x,V}``: V on the down-set of x with identity restrictions. Maps
    ``F -> I_{x,V}`` are the same as chain maps ``F(x) -> V``.
    """
    return _supported(base, base.down(x), complex)


def up_constant(base: FinitePoset, x: Element, complex: CochainComplex) -> SheafComplex:
    """
    V extended by zero from the minimal open U_x. Maps out of it are the
    same as chain maps ``V -> F(x)``.
    """
    return _supported(base, base.up(x), complex)


def twist_sheaf(F: SheafComplex, t: int) -> SheafComplex:
    stalks = {x: F[x].with_twist(F[x].twist + t) for x in F.base}
    return SheafComplex(
        F.base,
        stalks,
        {(x, y): F.restriction(x, y).with_endpoints(stalks[x], stalks[y]) for x, y in F.base.covers},
        check=False,
    )


# ################################################################
# underived operations
# ################################################################


def pullback_sheaf(f: MonotoneMap, G: SheafComplex) -> SheafComplex:
    """
    ``(f*G)(x) = G(f(x))``.
    """
    stalks = {x: G[f(x)] for x in f.source}
    restrictions = {(x, y): G.restriction(f(x), f(y)) for x, y in f.source.covers}
    return SheafComplex(f.source, stalks, restrictions, check=False)


def pullback_map(f: MonotoneMap, phi: SheafMap) -> SheafMap:
    return SheafMap(
        pullback_sheaf(f, phi.source),
        pullback_sheaf(f, phi.target),
        {x: phi(f(x)) for x in f.source},
        check=False,
    )


def restrict(F: SheafComplex, sub: FinitePoset) -> SheafComplex:
    return pullback_sheaf(MonotoneMap.inclusion(sub, F.base), F)


def restrict_map(phi: SheafMap, sub: FinitePoset) -> SheafMap:
    return pullback_map(MonotoneMap.inclusion(sub, phi.source.base), phi)


def _extend_by_zero(sub: FinitePoset, ambient: FinitePoset, F: SheafComplex) -> SheafComplex:
    zero = zero_complex(F.field, F.twist)
    stalks = {x: F[x] if x in sub else zero for x in ambient}
    restrictions = {}
    for x, y in ambient.covers:
        if x in sub and y in sub:
            restrictions[(x, y)] = F.restriction(x, y)
        else:
            restrictions[(x, y)] = ChainMap.zero(stalks[x], stalks[y])
    return SheafComplex(ambient, stalks, restrictions, check=False)


def _extend_map_by_zero(ambient: FinitePoset, source: SheafComplex, target: SheafComplex, phi: SheafMap) -> SheafMap:
    components = {x: phi(x).with_endpoints(source[x], target[x]) for x in phi.source.base}
    return SheafMap(source, target, components, check=False)


def shriek_extension(decomposition: OpenClosedDecomposition, B: SheafComplex) -> SheafComplex:
    """
    ``j_! B``: extension by zero from the open part.
    """
    return _extend_by_zero(decomposition.open, decomposition.ambient, B)


def closed_pushforward(decomposition: OpenClosedDecomposition, A: SheafComplex) -> SheafComplex:
    """
    ``i_* A``: extension by zero from the closed part, zero restrictions
    out of Z.
    """
    return _extend_by_zero(decomposition.closed, decomposition.ambient, A)


def shriek_extension_map(decomposition: OpenClosedDecomposition, phi: SheafMap) -> SheafMap:
    return _extend_map_by_zero(
        decomposition.ambient,
        shriek_extension(decomposition, phi.source),
        shriek_extension(decomposition, phi.target),
        phi,
    )


def closed_pushforward_map(decomposition: OpenClosedDecomposition, phi: SheafMap) -> SheafMap:
    return _extend_map_by_zero(
        decomposition.ambient,
        closed_pushforward(decomposition, phi.source),
        closed_pushforward(decomposition, phi.target),
        phi,
    )


def shriek_counit(decomposition: OpenClosedDecomposition, F: SheafComplex) -> SheafMap:
    """
    ``j_! j* F -> F``, identity on U.
    """
    source = shriek_extension(decomposition, restrict(F, decomposition.open))
    components = {x: ChainMap.identity(F[x]) for x in decomposition.open}
    return SheafMap(source, F, components)


def closed_unit(decomposition: OpenClosedDecomposition, F: SheafComplex) -> SheafMap:
    """
    ``F -> i_* i* F``, identity on Z.
    """
    target = closed_pushforward(decomposition, restrict(F, decomposition.closed))
    components = {x: ChainMap.identity(F[x]) for x in decomposition.closed}
    return SheafMap(F, target, components)


def sections(F: SheafComplex, V: Iterable[Element]) -> CochainComplex:
    """
    Underived sections over the open V: families ``(s_x)`` with
    ``rho(s_x) = s_y`` along every covering relation inside V.
    """
    P = F.base
    members = P.sorted(P.check_open(V))
    if not members:
        return zero_complex(F.field, F.twist)
    inside = set(members)
    pairs = [(x, y) for x, y in P.covers if x in inside and y in inside]
    points = direct_sum(*[F[x] for x in members])
    if not pairs:
        return points.complex
    edges = direct_sum(*[F[y] for _, y in pairs])
    difference = None
    for e, (x, y) in enumerate(pairs):
        a = members.index(x)
        b = members.index(y)
        term = edges.inclusions[e] @ (
            F.restriction(x, y) @ points.projections[a] - points.projections[b]
        )
        difference = term if difference is None else difference + term
    assert difference is not None
    return difference.kernel().complex


# ################################################################
# triangles and sums
# ################################################################


class SheafCone(NamedTuple):
    sheaf: SheafComplex
    inclusion: SheafMap
    projection: SheafMap


def sheaf_cone(phi: SheafMap) -> SheafCone:
    """
    Stalkwise cone, with the two triangle maps.
    """
    P = phi.source.base
    triangles = {x: cone(phi(x)) for x in P}
    stalks = {x: triangles[x].complex for x in P}
    restrictions = {
        (x, y): cone_map(
            phi(x), phi(y), phi.source.restriction(x, y), phi.target.restriction(x, y)
        ).with_endpoints(stalks[x], stalks[y])
        for x, y in P.covers
    }
    sheaf = SheafComplex(P, stalks, restrictions, check=False)
    shifted = {x: triangles[x].projection.target for x in P}
    shifted_sheaf = SheafComplex(
        P,
        shifted,
        {
            (x, y): ChainMap(
                shifted[x],
                shifted[y],
                {k - 1: m for k, m in phi.source.restriction(x, y).maps.items()},
                check=False,
            )
            for x, y in P.covers
        },
        check=False,
    )
    return SheafCone(
        sheaf,
        SheafMap(phi.target, sheaf, {x: triangles[x].inclusion for x in P}, check=False),
        SheafMap(sheaf, shifted_sheaf, {x: triangles[x].projection for x in P}, check=False),
    )


def sheaf_fiber(phi: SheafMap) -> Tuple[SheafComplex, SheafMap]:
    """
    Stalkwise fiber with its projection to the source.
    """
    P = phi.source.base
    fibers = {x: fiber(phi(x)) for x in P}
    stalks = {x: fibers[x][0] for x in P}
    restrictions = {
        (x, y): fiber_map(
            phi(x), phi(y), phi.source.restriction(x, y), phi.target.restriction(x, y)
        ).with_endpoints(stalks[x], stalks[y])
        for x, y in P.covers
    }
    sheaf = SheafComplex(P, stalks, restrictions, check=False)
    return sheaf, SheafMap(sheaf, phi.source, {x: fibers[x][1] for x in P}, check=False)


class SheafSum(NamedTuple):
    sheaf: SheafComplex
    inclusions: Tuple[SheafMap, ...]
    projections: Tuple[SheafMap, ...]


def sheaf_direct_sum(*sheaves: SheafComplex) -> SheafSum:
    P = sheaves[0].base
    sums = {x: direct_sum(*[F[x] for F in sheaves]) for x in P}
    stalks = {x: sums[x].complex for x in P}
    restrictions = {
        (x, y): sum_maps([F.restriction(x, y) for F in sheaves], stalks[x], stalks[y])
        for x, y in P.covers
    }
    sheaf = SheafComplex(P, stalks, restrictions, check=False)
    inclusions = tuple(
        SheafMap(F, sheaf, {x: sums[x].inclusions[i] for x in P}, check=False)
        for i, F in enumerate(sheaves)
    )
    projections = tuple(
        SheafMap(sheaf, F, {x: sums[x].projections[i] for x in P}, check=False)
        for i, F in enumerate(sheaves)
    )
    return SheafSum(sheaf, inclusions, projections)


def external_tensor(F: SheafComplex, G: SheafComplex) -> SheafComplex:
    """
    ``F ⊠ G`` on the product poset: stalkwise tensor, product restrictions.
    """
    P = product_poset(F.base, G.base).poset
    stalks = {(x, y): tensor(F[x], G[y]) for x, y in P}
    restrictions = {
        (a, b): tensor_maps(F.restriction(a[0], b[0]), G.restriction(a[1], b[1])).with_endpoints(
            stalks[a], stalks[b]
        )
        for a, b in P.covers
    }
    return SheafComplex(P, stalks, restrictions, check=False)


# ################################################################
# sampling
# ################################################################


def random_sheaf(
    field: PrimeField,
    base: FinitePoset,
    rng: np.random.Generator,
    generators: int = 2,
    max_dim: int = 1,
) -> SheafComplex:
    """
    The cone of a random map between two sums of up-constant sheaves
    ``V ⊗ Λ_{U_x}`` with random complexes V; every restriction pattern
    arises this way up to quasi-isomorphism.
    """
    points = list(base.elements)

    def pick() -> List[Tuple[Element, CochainComplex]]:
        chosen = []
        for _ in range(int(rng.integers(1, generators + 1))):
            x = points[int(rng.integers(0, len(points)))]
            dims = [int(d) for d in rng.integers(0, max_dim + 1, size=2)]
            chosen.append((x, random_complex(field, rng, 0, dims)))
        return chosen

    sources, targets = pick(), pick()
    S = sheaf_direct_sum(*[up_constant(base, x, V) for x, V in sources])
    T = sheaf_direct_sum(*[up_constant(base, x, W) for x, W in targets])
    blocks: Dict[Tuple[int, int], ChainMap] = {}
    for a, (x, V) in enumerate(sources):
        for b, (y, W) in enumerate(targets):
            if base.leq(y, x):
                blocks[(b, a)] = random_chain_map(V, W, rng)
    components = {}
    for z in base:
        total = None
        for (b, a), m in blocks.items():
            if not base.leq(sources[a][0], z):
                continue
            inclusion, projection = T.inclusions[b](z), S.projections[a](z)
            term = inclusion @ m.with_endpoints(projection.target, inclusion.source) @ projection
            total = term if total is None else total + term
        components[z] = total if total is not None else ChainMap.zero(S.sheaf[z], T.sheaf[z])
    phi = SheafMap(S.sheaf, T.sheaf, components)
    return sheaf_cone(phi).sheaf


def sheaf_cone_map(phi: SheafMap, psi: SheafMap, a: SheafMap, b: SheafMap) -> SheafMap:
    """
    ``cone(phi) -> cone(psi)`` induced by a strictly commuting square
    ``b phi = psi a``.
    """
    source, target = sheaf_cone(phi).sheaf, sheaf_cone(psi).sheaf
    return SheafMap(
        source,
        target,
        {
            x: cone_map(phi(x), psi(x), a(x), b(x)).with_endpoints(source[x], target[x])
            for x in phi.source.base
        },
        check=False,
    )


def sheaf_fiber_map(phi: SheafMap, psi: SheafMap, a: SheafMap, b: SheafMap) -> SheafMap:
    source, target = sheaf_fiber(phi)[0], sheaf_fiber(psi)[0]
    return SheafMap(
        source,
        target,
        {
            x: fiber_map(phi(x), psi(x), a(x), b(x)).with_endpoints(source[x], target[x])
            for x in phi.source.base
        },
        check=False,
    )
