"""
Derived functors on finite posets.

Everything is computed from one construction, the complex of chain
cochains: for a sheaf complex F and a face-closed set S of chains
``x_0 < ... < x_c``, the block of ``(sigma, p)`` is ``F^p(max sigma)``
placed in total degree ``p + c``. The differential is
``d_F + (-1)^p delta`` where ``delta`` is the alternating face sum and
deleting the top element applies the restriction of F.

Over the chains of an open V this computes ``RΓ(V, F)``; over the chains
of the minimal opens it gives a resolution of F by point injectives.
"""
import logging
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .complexes import ChainMap, CochainComplex, tensor, tensor_maps, triangle_map
from .exceptions import HypothesisFailure
from .linalg import Matrix, PrimeField
from .posets import MonotoneMap, OpenClosedDecomposition, poset_pullback, pseudodisk
from .sheaves import (
    SheafComplex,
    SheafMap,
    closed_unit,
    pullback_map,
    pullback_sheaf,
    restrict,
    sheaf_fiber,
    shriek_counit,
    twist_sheaf,
    unit_sheaf,
)
from .typing import Chain, CohomologyTable, Element

logger = logging.getLogger(__name__)

__all__ = [
    "Cochains",
    "cochains",
    "derived_sections",
    "global_sections",
    "injective_resolution",
    "derived_pushforward",
    "derived_pushforward_map",
    "unit",
    "counit",
    "chain_pullback",
    "descent_map",
    "block_inclusion",
    "fiber_homotopy",
    "exceptional_pullback",
    "check_localization",
    "check_purity",
    "derived_hom",
    "hom_dimension",
    "sheaf_map_class",
    "check_base_change",
    "cup_product",
    "sheaf_tensor",
    "check_triangle_identities",
]


class Cochains:
    """
    Chain cochains of `sheaf` over the face-closed chain set `chains`.

    `blocks[n]` lists ``(chain, p, start, size)`` for total degree n; the
    coordinates of a vector of degree n are the concatenation of its blocks.
    """

    def __init__(self, sheaf: SheafComplex, chains: Sequence[Chain]) -> None:
        self.sheaf = sheaf
        self.chains: Tuple[Chain, ...] = tuple(chains)
        self.members = frozenset(self.chains)
        for chain in self.chains:
            for i in range(len(chain)):
                face = chain[:i] + chain[i + 1 :]
                if face and face not in self.members:
                    raise HypothesisFailure("Chain set is not closed under faces", chain)
        self.blocks: Dict[int, List[Tuple[Chain, int, int, int]]] = {}
        self._where: Dict[Tuple[Chain, int], Tuple[int, int]] = {}
        degrees = set()
        for chain in self.chains:
            stalk = sheaf[chain[-1]]
            for p in stalk.degrees():
                size = stalk.dim(p)
                if size:
                    degrees.add(p + len(chain) - 1)
        lo = min(degrees, default=0)
        hi = max(degrees, default=-1)
        for n in range(lo, hi + 1):
            start = 0
            row = []
            for chain in self.chains:
                p = n - len(chain) + 1
                size = sheaf[chain[-1]].dim(p)
                if size:
                    row.append((chain, p, start, size))
                    self._where[(chain, p)] = (n, start)
                    start += size
            self.blocks[n] = row
        self.complex = self._assemble(lo, hi)

    def locate(self, chain: Chain, p: int) -> Optional[Tuple[int, int]]:
        """
        ``(degree, offset)`` of a block, or None when it is zero.
        """
        return self._where.get((chain, p))

    def _cofaces(self) -> Dict[Chain, List[Tuple[Chain, int]]]:
        cofaces: Dict[Chain, List[Tuple[Chain, int]]] = {c: [] for c in self.chains}
        for chain in self.chains:
            if len(chain) < 2:
                continue
            for i in range(len(chain)):
                cofaces[chain[:i] + chain[i + 1 :]].append((chain, i))
        return cofaces

    def _assemble(self, lo: int, hi: int) -> CochainComplex:
        F = self.sheaf
        field = F.field
        dims = [sum(size for *_, size in self.blocks[n]) for n in range(lo, hi + 1)]
        cofaces = self._cofaces()
        diffs = []
        for n in range(lo, hi):
            d = field.zeros(dims[n - lo + 1], dims[n - lo])
            for chain, p, start, size in self.blocks[n]:
                top = chain[-1]
                inner = self.locate(chain, p + 1)
                if inner is not None:
                    d[inner[1] : inner[1] + F[top].dim(p + 1), start : start + size] += F[top].d(p)
                sign = -1 if p % 2 else 1
                for bigger, i in cofaces[chain]:
                    where = self.locate(bigger, p)
                    if where is None:
                        continue
                    rows = F[bigger[-1]].dim(p)
                    if i == len(bigger) - 1:
                        block = F.restriction(top, bigger[-1])(p)
                    else:
                        block = field.identity(size)
                    face_sign = sign * (-1 if i % 2 else 1)
                    d[where[1] : where[1] + rows, start : start + size] += face_sign * block
            diffs.append(d % field.ell)
        if hi < lo:
            return CochainComplex(field, 0, (), (), F.twist, check=False)
        return CochainComplex(field, lo, dims, diffs, F.twist, check=False)

    def __repr__(self) -> str:
        return f"<Cochains over {len(self.chains)} chains: {self.complex!r}>"

    def vector(self, values: Dict[Tuple[Chain, int], Matrix], degree: int) -> Matrix:
        """
        Assemble a column vector of the given degree from block values.
        """
        field = self.sheaf.field
        out = field.zeros(self.complex.dim(degree), 1)
        for (chain, p), v in values.items():
            where = self.locate(chain, p)
            if where is not None and where[0] == degree:
                out[where[1] : where[1] + v.shape[0]] = v
        return out


def cochains(F: SheafComplex, chains: Sequence[Chain]) -> Cochains:
    return Cochains(F, chains)


def derived_sections(F: SheafComplex, V: Iterable[Element]) -> Cochains:
    """
    RΓ(V, F) for an open V.
    """
    opens = F.base.check_open(V)
    return Cochains(F, F.base.chains(opens))


def global_sections(F: SheafComplex) -> CochainComplex:
    return Cochains(F, F.base.chains()).complex


def _block_projection(big: Cochains, small: Cochains) -> ChainMap:
    """
    Projection onto the blocks of a face-closed subset of the chains.
    """
    field = big.sheaf.field
    source, target = big.complex, small.complex
    maps = {}
    for n in range(min(source.lo, target.lo), max(source.hi, target.hi) + 1):
        m = field.zeros(target.dim(n), source.dim(n))
        for chain, p, start, size in small.blocks.get(n, []):
            where = big.locate(chain, p)
            if where is not None:
                m[start : start + size, where[1] : where[1] + size] = field.identity(size)
        maps[n] = m
    return ChainMap(source, target, maps, check=False)


def block_inclusion(small: Cochains, big: Cochains) -> ChainMap:
    """
    Identity from the blocks of `small` onto the same blocks of `big`. A
    chain map when every other block of `big` is zero.
    """
    projection = _block_projection(big, small)
    return ChainMap(small.complex, big.complex, {n: m.T.copy() for n, m in projection.maps.items()})


def _pushforward_chains(f: MonotoneMap) -> Dict[Element, List[Chain]]:
    X = f.source
    return {q: X.chains(f.preimage(f.target.up(q))) for q in f.target}


def derived_pushforward_cochains(f: MonotoneMap, F: SheafComplex) -> Dict[Element, Cochains]:
    return {q: Cochains(F, chains) for q, chains in _pushforward_chains(f).items()}


def derived_pushforward(f: MonotoneMap, F: SheafComplex) -> SheafComplex:
    """
    ``(Rf_*F)(q) = RΓ(f^{-1}(U_q), F)``; restrictions are block projections.
    """
    parts = derived_pushforward_cochains(f, F)
    stalks = {q: parts[q].complex for q in f.target}
    restrictions = {
        (q, r): _block_projection(parts[q], parts[r]) for q, r in f.target.covers
    }
    logger.debug("Rf_* computed on %d points", len(stalks))
    return SheafComplex(f.target, stalks, restrictions, check=False)


def _apply_blockwise(source: Cochains, target: Cochains, phi: SheafMap) -> ChainMap:
    field = phi.field
    maps = {}
    lo = min(source.complex.lo, target.complex.lo)
    hi = max(source.complex.hi, target.complex.hi)
    for n in range(lo, hi + 1):
        m = field.zeros(target.complex.dim(n), source.complex.dim(n))
        for chain, p, start, size in source.blocks.get(n, []):
            where = target.locate(chain, p)
            if where is None:
                continue
            block = phi(chain[-1])(p)
            m[where[1] : where[1] + block.shape[0], start : start + size] = block
        maps[n] = m
    return ChainMap(source.complex, target.complex, maps, check=False)


def derived_pushforward_map(f: MonotoneMap, phi: SheafMap) -> SheafMap:
    source_parts = derived_pushforward_cochains(f, phi.source)
    target_parts = derived_pushforward_cochains(f, phi.target)
    source = derived_pushforward(f, phi.source)
    target = derived_pushforward(f, phi.target)
    components = {
        q: _apply_blockwise(source_parts[q], target_parts[q], phi).with_endpoints(source[q], target[q])
        for q in f.target
    }
    return SheafMap(source, target, components, check=False)


def cochains_map(source: Cochains, target: Cochains, phi: SheafMap) -> ChainMap:
    """
    The map of chain cochains over the same chain set induced by `phi`.
    """
    return _apply_blockwise(source, target, phi)


def descent_map(source: Cochains, target: Cochains, pieces: Dict[Element, Cochains]) -> ChainMap:
    """
    ``RΓ(V, F) -> RΓ(S, K)`` for a sheaf K with ``K(y) = RΓ(V_y, F)`` and
    every ``V_y`` inside V: restriction of a cochain into each one-point
    chain ``(y)``, zero on longer chains.
    """
    field = source.sheaf.field
    maps = {}
    lo = min(source.complex.lo, target.complex.lo)
    hi = max(source.complex.hi, target.complex.hi)
    for n in range(lo, hi + 1):
        m = field.zeros(target.complex.dim(n), source.complex.dim(n))
        for chain, _, start, size in target.blocks.get(n, []):
            if len(chain) == 1:
                m[start : start + size] = _block_projection(source, pieces[chain[0]])(n)
        maps[n] = m
    return ChainMap(source.complex, target.complex, maps)


class Resolution(NamedTuple):
    sheaf: SheafComplex
    augmentation: SheafMap


def _augmentation(F: SheafComplex, y: Element, target: Cochains) -> ChainMap:
    """
    ``F(y) -> RΓ(V, F)`` for an open V inside U_y: ``s -> (rho s)`` on
    one-point chains.
    """
    field = F.field
    stalk = F[y]
    maps = {}
    for n in range(min(stalk.lo, target.complex.lo), max(stalk.hi, target.complex.hi) + 1):
        m = field.zeros(target.complex.dim(n), stalk.dim(n))
        for chain, p, start, size in target.blocks.get(n, []):
            if len(chain) == 1:
                m[start : start + size] = F.restriction(y, chain[0])(p)
        maps[n] = m
    return ChainMap(stalk, target.complex, maps, check=False)


def injective_resolution(F: SheafComplex) -> Resolution:
    """
    ``I(y) = RΓ(U_y, F)``: each block of a chain sigma is the point
    injective at ``min sigma`` with value ``F(max sigma)``. The
    augmentation ``F -> I`` is a stalkwise quasi-isomorphism.
    """
    identity = MonotoneMap.identity(F.base)
    parts = derived_pushforward_cochains(identity, F)
    I = derived_pushforward(identity, F)
    aug = SheafMap(
        F,
        I,
        {y: _augmentation(F, y, parts[y]).with_endpoints(F[y], I[y]) for y in F.base},
        check=False,
    )
    return Resolution(I, aug)


def unit(f: MonotoneMap, G: SheafComplex) -> SheafMap:
    """
    ``G -> Rf_* f* G``: ``g -> (rho_{q <= f(x)} g)_x`` on one-point chains.
    """
    pulled = pullback_sheaf(f, G)
    parts = derived_pushforward_cochains(f, pulled)
    target = derived_pushforward(f, pulled)
    field = G.field
    components = {}
    for q in f.target:
        stalk = G[q]
        cochain = parts[q]
        maps = {}
        for n in range(min(stalk.lo, cochain.complex.lo), max(stalk.hi, cochain.complex.hi) + 1):
            m = field.zeros(cochain.complex.dim(n), stalk.dim(n))
            for chain, p, start, size in cochain.blocks.get(n, []):
                if len(chain) == 1:
                    m[start : start + size] = G.restriction(q, f(chain[0]))(p)
            maps[n] = m
        components[q] = ChainMap(stalk, target[q], maps, check=False)
    return SheafMap(G, target, components, check=False)


def counit(f: MonotoneMap, K: SheafComplex) -> SheafMap:
    """
    ``f* Rf_* K -> I(K)``, the projection from chains in ``f^{-1}(U_{f(x)})``
    onto chains in ``U_x``. Composed with the inverse of the augmentation
    ``K -> I(K)`` this is the counit.
    """
    source = pullback_sheaf(f, derived_pushforward(f, K))
    parts = derived_pushforward_cochains(f, K)
    resolution = injective_resolution(K)
    local = derived_pushforward_cochains(MonotoneMap.identity(K.base), K)
    components = {
        x: _block_projection(parts[f(x)], local[x]).with_endpoints(source[x], resolution.sheaf[x])
        for x in f.source
    }
    return SheafMap(source, resolution.sheaf, components, check=False)


def chain_pullback(
    h: MonotoneMap, source: Cochains, target: Cochains, via: Optional[SheafMap] = None
) -> ChainMap:
    """
    ``RΓ(S, F) -> RΓ(S', G)`` along ``h: X' -> X`` mapping the chains S'
    into S where injective: ``s -> (sigma' -> s(h sigma'))``, zero on chains
    that h collapses. `via` is a map ``h*F -> G``; without it ``G = h*F``.
    """
    field = source.sheaf.field
    maps = {}
    lo = min(source.complex.lo, target.complex.lo)
    hi = max(source.complex.hi, target.complex.hi)
    for n in range(lo, hi + 1):
        m = field.zeros(target.complex.dim(n), source.complex.dim(n))
        for chain, p, start, size in target.blocks.get(n, []):
            image = tuple(h(x) for x in chain)
            if len(set(image)) != len(image):
                continue
            where = source.locate(image, p)
            if where is None:
                if source.sheaf[image[-1]].dim(p) and image not in source.members:
                    raise HypothesisFailure("Chain maps outside the source chain set", chain)
                continue
            block = via(chain[-1])(p) if via is not None else field.identity(size)
            m[start : start + size, where[1] : where[1] + block.shape[1]] = block
        maps[n] = m
    return ChainMap(source.complex, target.complex, maps)


# ################################################################
# localization
# ################################################################


def _open_unit(decomposition: OpenClosedDecomposition, F: SheafComplex) -> SheafMap:
    """
    ``F -> Rj_* j* F``.
    """
    return unit(decomposition.j, F)


class ExceptionalPullback(NamedTuple):
    sheaf: SheafComplex
    projection: SheafMap
    unit: SheafMap


def exceptional_pullback(decomposition: OpenClosedDecomposition, F: SheafComplex) -> ExceptionalPullback:
    """
    ``i^! F = fiber(i* F -> i* Rj_* j* F)``, carrying the twist
    ``-codimension``. Also returns the fiber projection to ``i* F`` and the
    restricted unit.
    """
    u = _open_unit(decomposition, F)
    Z = decomposition.closed
    restricted = SheafMap(
        restrict(F, Z),
        restrict(u.target, Z),
        {x: u(x) for x in Z},
        check=False,
    )
    sheaf, projection = sheaf_fiber(restricted)
    twisted = twist_sheaf(sheaf, -decomposition.codimension)
    projection = SheafMap(
        twisted,
        projection.target,
        {x: projection(x).with_endpoints(twisted[x], projection.target[x]) for x in Z},
        check=False,
    )
    return ExceptionalPullback(twisted, projection, restricted)


def fiber_homotopy(phi: ChainMap, source: CochainComplex) -> Dict[int, Matrix]:
    """
    ``h(c, x) = -x`` on ``fiber(phi)``, a null-homotopy of ``phi`` composed
    with the fiber projection.
    """
    field = phi.field
    C, D = phi.source, phi.target
    return {
        k: np.hstack([field.zeros(D.dim(k - 1), C.dim(k)), field.scalar(D.dim(k - 1), -1)])
        % field.ell
        for k in source.degrees()
    }


class LocalizationCheck(NamedTuple):
    open_closed: bool
    closed_open: bool
    failures: List[str]


def check_localization(decomposition: OpenClosedDecomposition, F: SheafComplex) -> LocalizationCheck:
    """
    Stalkwise exactness of ``j_! j* F -> F -> i_* i* F`` and of
    ``i_* i^! F -> F -> Rj_* j* F``.
    """
    failures = []
    first = shriek_counit(decomposition, F)
    second = closed_unit(decomposition, F)
    for x in F.base:
        if not triangle_map(first(x), second(x)).is_quasi_iso():
            failures.append(f"j_!j* -> id -> i_*i* at {x!r}")
    open_closed = not failures
    shriek = exceptional_pullback(decomposition, F)
    u = _open_unit(decomposition, F)
    for x in F.base:
        if x in decomposition.closed:
            p = shriek.projection(x)
            exact = triangle_map(p, u(x), fiber_homotopy(u(x), p.source)).is_quasi_iso()
        else:
            exact = u(x).is_quasi_iso()
        if not exact:
            failures.append(f"i_*i^! -> id -> Rj_*j* at {x!r}")
    closed_open = all("i^!" not in f for f in failures)
    return LocalizationCheck(open_closed, closed_open, failures)


def check_purity(k: int, field: PrimeField) -> Tuple[CohomologyTable, int]:
    """
    ``i^! Λ`` at the origin of the pseudodisk D_k: its cohomology table and
    twist label.
    """
    disk = pseudodisk(k)
    decomposition = OpenClosedDecomposition(disk, ["0"], codimension=1)
    result = exceptional_pullback(decomposition, unit_sheaf(disk, field))
    stalk = result.sheaf["0"]
    return stalk.cohomology_table(), stalk.twist


# ################################################################
# RHom
# ################################################################


class HomComplex:
    """
    ``RHom(A, B)`` computed as ``Hom(A, I(B))``: the block of a chain sigma
    and degrees ``(q, p)`` is ``Hom(A^q(min sigma), B^p(max sigma))`` in
    degree ``p - q + |sigma| - 1``, stored row-major.
    """

    def __init__(self, A: SheafComplex, B: SheafComplex, chains: Optional[Sequence[Chain]] = None) -> None:
        self.A, self.B = A, B
        self.chains: Tuple[Chain, ...] = tuple(A.base.chains() if chains is None else chains)
        self.blocks: Dict[int, List[Tuple[Chain, int, int, int, int]]] = {}
        self._where: Dict[Tuple[Chain, int, int], Tuple[int, int]] = {}
        entries: Dict[int, List[Tuple[Chain, int, int, int]]] = {}
        for chain in self.chains:
            source, target = A[chain[0]], B[chain[-1]]
            for q in source.degrees():
                for p in target.degrees():
                    size = source.dim(q) * target.dim(p)
                    if size:
                        n = p - q + len(chain) - 1
                        entries.setdefault(n, []).append((chain, q, p, size))
        lo = min(entries, default=0)
        hi = max(entries, default=-1)
        for n in range(lo, hi + 1):
            start = 0
            row = []
            for chain, q, p, size in entries.get(n, []):
                row.append((chain, q, p, start, size))
                self._where[(chain, q, p)] = (n, start)
                start += size
            self.blocks[n] = row
        self.complex = self._assemble(lo, hi)

    def locate(self, chain: Chain, q: int, p: int) -> Optional[Tuple[int, int]]:
        return self._where.get((chain, q, p))

    def _assemble(self, lo: int, hi: int) -> CochainComplex:
        A, B = self.A, self.B
        field = A.field
        if hi < lo:
            return CochainComplex(field, 0, (), (), B.twist - A.twist, check=False)
        dims = [sum(block[-1] for block in self.blocks[n]) for n in range(lo, hi + 1)]
        members = set(self.chains)
        cofaces: Dict[Chain, List[Tuple[Chain, int]]] = {c: [] for c in self.chains}
        for chain in self.chains:
            if len(chain) > 1:
                for i in range(len(chain)):
                    face = chain[:i] + chain[i + 1 :]
                    if face in members:
                        cofaces[face].append((chain, i))
        diffs = []
        for n in range(lo, hi):
            d = field.zeros(dims[n - lo + 1], dims[n - lo])
            hom_sign = -1 if n % 2 else 1

            def put(where: Optional[Tuple[int, int]], block: Matrix, start: int, size: int) -> None:
                if where is not None and where[0] == n + 1:
                    d[where[1] : where[1] + block.shape[0], start : start + size] += block

            for chain, q, p, start, size in self.blocks[n]:
                a, b = A[chain[0]], B[chain[-1]]
                # d_B phi
                put(self.locate(chain, q, p + 1), field.kron(b.d(p), field.identity(a.dim(q))), start, size)
                # -(-1)^n phi d_A
                put(
                    self.locate(chain, q - 1, p),
                    field.scale(field.kron(field.identity(b.dim(p)), a.d(q - 1).T), -hom_sign),
                    start,
                    size,
                )
                sign = -1 if p % 2 else 1
                for bigger, i in cofaces[chain]:
                    face_sign = sign * (-1 if i % 2 else 1)
                    if i == 0:
                        rho = A.restriction(bigger[0], chain[0])(q)
                        block = field.kron(field.identity(b.dim(p)), rho.T)
                    elif i == len(bigger) - 1:
                        rho = B.restriction(chain[-1], bigger[-1])(p)
                        block = field.kron(rho, field.identity(a.dim(q)))
                    else:
                        block = field.identity(size)
                    put(self.locate(bigger, q, p), field.scale(block, face_sign), start, size)
            diffs.append(d % field.ell)
        return CochainComplex(field, lo, dims, diffs, B.twist - A.twist, check=False)

    def vector(self, phi: SheafMap) -> Matrix:
        """
        The degree-0 cocycle of a sheaf map, supported on one-point chains.
        """
        field = self.A.field
        out = field.zeros(self.complex.dim(0), 1)
        for x in self.A.base:
            component = phi(x)
            for q in self.A[x].degrees():
                where = self.locate((x,), q, q)
                if where is not None:
                    block = component(q).reshape(-1, 1)
                    out[where[1] : where[1] + block.shape[0]] = block
        return out


def derived_hom(A: SheafComplex, B: SheafComplex) -> HomComplex:
    return HomComplex(A, B)


def hom_dimension(A: SheafComplex, B: SheafComplex, k: int = 0) -> int:
    """
    ``dim Hom(A, B[k])`` in the derived category.
    """
    return derived_hom(A, B).complex.betti(k)


def sheaf_map_class(phi: SheafMap) -> Matrix:
    """
    Coordinates of the class of `phi` in ``H^0 RHom``.
    """
    hom = derived_hom(phi.source, phi.target)
    return hom.complex.class_of(0, hom.vector(phi))


# ################################################################
# base change and products
# ################################################################


class BaseChange(NamedTuple):
    holds: bool
    source_tables: Dict[Element, CohomologyTable]
    target_tables: Dict[Element, CohomologyTable]
    failing: List[Element]


def check_base_change(f: MonotoneMap, g: MonotoneMap, F: SheafComplex) -> BaseChange:
    """
    For ``f: X -> Y`` and ``g: Y' -> Y`` with ``X' = X x_Y Y'``, compares
    ``g* Rf_* F`` and ``Rf'_* g'* F`` through the chain pullback along ``g'``.
    """
    square = poset_pullback(f, g)
    g_prime, f_prime = square.left, square.right
    pulled = pullback_sheaf(g_prime, F)
    upstairs = derived_pushforward_cochains(f, F)
    downstairs = derived_pushforward_cochains(f_prime, pulled)
    failing = []
    source_tables = {}
    target_tables = {}
    for y in g.source:
        comparison = chain_pullback(g_prime, upstairs[g(y)], downstairs[y])
        source_tables[y] = comparison.source.cohomology_table()
        target_tables[y] = comparison.target.cohomology_table()
        if not comparison.is_quasi_iso():
            failing.append(y)
    return BaseChange(not failing, source_tables, target_tables, failing)


def sheaf_tensor(F: SheafComplex, G: SheafComplex) -> SheafComplex:
    """
    Stalkwise tensor product of two sheaves on the same poset.
    """
    stalks = {x: tensor(F[x], G[x]) for x in F.base}
    restrictions = {
        (x, y): tensor_maps(F.restriction(x, y), G.restriction(x, y)).with_endpoints(stalks[x], stalks[y])
        for x, y in F.base.covers
    }
    return SheafComplex(F.base, stalks, restrictions, check=False)


def cup_product(
    left: Cochains,
    right: Cochains,
    product: Cochains,
    f: Optional[ChainMap] = None,
    g: Optional[ChainMap] = None,
) -> ChainMap:
    """
    ``RΓ(S, F) ⊗ RΓ(S, G) -> RΓ(S, F ⊗ G)`` (Alexander-Whitney):
    ``(s ∪ t)(x_0..x_{a+b}) = (-1)^{a q} rho(s(x_0..x_a)) ⊗ t(x_a..x_{a+b})``
    for s of chain degree a and t of internal degree q.

    With ``f: A -> RΓ(S, F)`` and ``g: B -> RΓ(S, G)`` the result is the
    composite with ``f ⊗ g`` on ``A ⊗ B``, evaluated on the columns of f and
    g without forming the tensor product of the two cochain complexes.
    """
    F, G = left.sheaf, right.sheaf
    field = F.field
    f = ChainMap.identity(left.complex) if f is None else f
    g = ChainMap.identity(right.complex) if g is None else g
    A, B = f.source, g.source
    source = tensor(A, B)
    target = product.complex
    # right blocks by degree and first point of the chain
    starting: Dict[Tuple[int, Element], List[Tuple[Chain, int, int, int]]] = {}
    for t_degree in right.complex.degrees():
        for block in right.blocks.get(t_degree, []):
            starting.setdefault((t_degree, block[0][0]), []).append(block)
    maps = {}
    for n in source.degrees():
        columns = []
        for a_degree in A.degrees():
            b_degree = n - a_degree
            if not (A.dim(a_degree) and B.dim(b_degree)):
                continue
            s, t = f(a_degree), g(b_degree)
            block = field.zeros(target.dim(n), s.shape[1] * t.shape[1])
            for chain_s, p, start_s, size_s in left.blocks.get(a_degree, []):
                a = len(chain_s) - 1
                values = s[start_s : start_s + size_s]
                for chain_t, q, start_t, size_t in starting.get((b_degree, chain_s[-1]), []):
                    joined = chain_s + chain_t[1:]
                    where = product.locate(joined, p + q)
                    if where is None:
                        continue
                    top = joined[-1]
                    rho = F.restriction(chain_s[-1], top)(p)
                    sign = -1 if (a * q) % 2 else 1
                    # rows: F^p(top) ⊗ G^q(top) inside the tensor block of the product
                    contribution = field.kron(field.mul(rho, values), t[start_t : start_t + size_t])
                    r0 = where[1] + _tensor_offset(F[top], G[top], p, q)
                    block[r0 : r0 + contribution.shape[0]] += sign * contribution
            columns.append(block % field.ell)
        maps[n] = field.hstack(columns, target.dim(n))
    return ChainMap(source, target, maps)


def _tensor_offset(C: CochainComplex, D: CochainComplex, p: int, q: int) -> int:
    """
    Offset of ``C^p ⊗ D^q`` inside ``(C ⊗ D)^{p+q}``.
    """
    offset = 0
    for a in C.degrees():
        if a == p:
            return offset
        b = p + q - a
        if C.dim(a) and D.dim(b):
            offset += C.dim(a) * D.dim(b)
    return offset


def check_triangle_identities(f: MonotoneMap, G: SheafComplex, K: SheafComplex) -> Tuple[bool, bool]:
    """
    ``(eps f*)(f* u) = aug`` on ``f* G`` (strictly), and
    ``(Rf_* eps)(u Rf_*) = Rf_*(aug)`` on ``Rf_* K`` (on cohomology).
    """
    pulled = pullback_sheaf(f, G)
    left = counit(f, pulled) @ pullback_map(f, unit(f, G))
    first = left == injective_resolution(pulled).augmentation
    pushed = derived_pushforward(f, K)
    right = derived_pushforward_map(f, counit(f, K)) @ unit(f, pushed)
    expected = derived_pushforward_map(f, injective_resolution(K).augmentation)
    second = True
    for q in f.target:
        for k in pushed[q].degrees():
            if not G.field.equal(right(q).induced(k), expected(q).induced(k)):
                second = False
    return first, second
