"""
Bounded cochain complexes of finite dimensional F_ell vector spaces.

Degree ``k`` of a complex is a vector space of dimension ``dim(k)``; the
differential ``d(k)`` is a ``dim(k + 1) x dim(k)`` matrix acting on column
vectors. Values are immutable; cohomology data is cached per instance.
"""
import logging
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

try:
    from mypy_extensions import mypyc_attr
except ImportError:  # pragma: no cover

    def mypyc_attr(*attrs, **kwattrs):  # type: ignore
        return lambda x: x


from .exceptions import HypothesisFailure, NotAChainMap, ShapeMismatch
from .linalg import Matrix, PrimeField
from .typing import CohomologyTable

logger = logging.getLogger(__name__)

__all__ = [
    "CochainComplex",
    "ChainMap",
    "Cohomology",
    "ConeTriangle",
    "DirectSum",
    "ImageFactorization",
    "MinimalModel",
    "cone",
    "fiber",
    "shift",
    "shift_map",
    "twist_by",
    "direct_sum",
    "tensor",
    "tensor_maps",
    "minimal_model",
    "minimal_map",
    "hom_complex",
    "truncate_below",
    "homotopy_between",
    "quasi_inverse",
    "check_cone_sequence",
    "cone_map",
    "fiber_map",
    "triangle_map",
    "quotient",
    "sum_maps",
    "random_complex",
    "random_chain_map",
    "unit_complex",
    "concentrated",
]


class Cohomology(NamedTuple):
    dimension: int
    # cocycles, one per column, whose classes form a basis of H^k
    representatives: Matrix


@mypyc_attr(allow_interpreted_subclasses=True)
class CochainComplex:
    __slots__ = ("field", "lo", "dims", "diffs", "twist", "_cache")

    def __init__(
        self,
        field: PrimeField,
        lo: int,
        dims: Sequence[int],
        differentials: Optional[Sequence[Matrix]] = None,
        twist: int = 0,
        check: bool = True,
    ) -> None:
        self.field = field
        self.lo = lo
        self.dims: Tuple[int, ...] = tuple(int(d) for d in dims)
        if differentials is None:
            differentials = [
                field.zeros(self.dims[i + 1], self.dims[i])
                for i in range(len(self.dims) - 1)
            ]
        if len(differentials) != max(len(self.dims) - 1, 0):
            raise ShapeMismatch(
                "Need one differential between each pair of adjacent degrees",
                (len(self.dims), len(differentials)),
            )
        self.diffs: Tuple[Matrix, ...] = tuple(field.reduce(d) for d in differentials)
        self.twist = twist
        self._cache: Dict[Tuple[str, int], object] = {}
        if check:
            self._validate()

    def _validate(self) -> None:
        for i, d in enumerate(self.diffs):
            if d.shape != (self.dims[i + 1], self.dims[i]):
                raise ShapeMismatch(
                    f"d^{self.lo + i} has shape {d.shape}, "
                    f"expected {(self.dims[i + 1], self.dims[i])}",
                    self.lo + i,
                )
        for i in range(len(self.diffs) - 1):
            if not self.field.is_zero(self.field.mul(self.diffs[i + 1], self.diffs[i])):
                raise NotAChainMap(f"d^{self.lo + i + 1} d^{self.lo + i} != 0", self.lo + i)

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    @property
    def ell(self) -> int:
        return self.field.ell

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def support(self) -> Tuple[int, int]:
        nonzero = [k for k in self.degrees() if self.dim(k)]
        if not nonzero:
            return (0, -1)
        return (min(nonzero), max(nonzero))

    def dim(self, k: int) -> int:
        if self.lo <= k <= self.hi:
            return self.dims[k - self.lo]
        return 0

    def d(self, k: int) -> Matrix:
        if self.lo <= k < self.hi:
            return self.diffs[k - self.lo]
        return self.field.zeros(self.dim(k + 1), self.dim(k))

    def total_dimension(self) -> int:
        return sum(self.dims)

    def __repr__(self) -> str:
        return (
            f"CochainComplex(ell={self.ell}, lo={self.lo}, dims={list(self.dims)}, "
            f"twist={self.twist})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CochainComplex):
            return NotImplemented
        if self.field != other.field or self.twist != other.twist:
            return False
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return all(self.dim(k) == other.dim(k) for k in range(lo, hi + 1)) and all(
            self.field.equal(self.d(k), other.d(k)) for k in range(lo, hi)
        )

    __hash__ = None  # type: ignore

    # ################################################################
    # cohomology
    # ################################################################

    def _cohomology_data(self, k: int) -> Tuple[Matrix, Matrix]:
        """
        (basis of B^k, cocycle representatives of H^k). The columns of the
        two blocks together are a basis of Z^k.
        """
        key = ("H", k)
        if key not in self._cache:
            field = self.field
            cocycles = field.kernel(self.d(k))
            boundaries = field.image(self.d(k - 1))
            reps = field.extension(boundaries, cocycles)
            self._cache[key] = (boundaries, reps)
        return self._cache[key]  # type: ignore

    def cohomology(self, k: int) -> Cohomology:
        reps = self._cohomology_data(k)[1]
        return Cohomology(reps.shape[1], reps)

    def betti(self, k: int) -> int:
        return self.cohomology(k).dimension

    def cohomology_table(self) -> CohomologyTable:
        return {k: self.betti(k) for k in self.degrees() if self.betti(k)}

    def is_acyclic(self) -> bool:
        return not self.cohomology_table()

    def euler_characteristic(self) -> int:
        return sum((-1) ** (k % 2) * self.dim(k) for k in self.degrees())

    def class_of(self, k: int, cocycles: Matrix) -> Matrix:
        """
        Coordinates of the classes of the given cocycles in the basis of
        representatives.
        """
        boundaries, reps = self._cohomology_data(k)
        basis = np.hstack([boundaries, reps])
        coords = self.field.solve(basis, cocycles)
        if coords is None:
            raise NotAChainMap(f"Vectors are not cocycles in degree {k}", k)
        return coords[boundaries.shape[1] :]

    # ################################################################
    # structure
    # ################################################################

    def with_twist(self, twist: int) -> "CochainComplex":
        return CochainComplex(self.field, self.lo, self.dims, self.diffs, twist, check=False)

    def trimmed(self) -> "CochainComplex":
        lo, hi = self.support()
        if hi < lo:
            return CochainComplex(self.field, 0, (), (), self.twist, check=False)
        return CochainComplex(
            self.field,
            lo,
            [self.dim(k) for k in range(lo, hi + 1)],
            [self.d(k) for k in range(lo, hi)],
            self.twist,
            check=False,
        )


def zero_complex(field: PrimeField, twist: int = 0) -> CochainComplex:
    return CochainComplex(field, 0, (), (), twist)


def concentrated(field: PrimeField, degree: int, dim: int, twist: int = 0) -> CochainComplex:
    """
    `dim` copies of Λ placed in a single degree.
    """
    return CochainComplex(field, degree, (dim,), (), twist)


def unit_complex(field: PrimeField) -> CochainComplex:
    return concentrated(field, 0, 1)


def _span(*complexes: CochainComplex) -> Tuple[int, int]:
    lo = min(c.lo for c in complexes)
    hi = max(c.hi for c in complexes)
    return lo, max(hi, lo)


@mypyc_attr(allow_interpreted_subclasses=True)
class ChainMap:
    """
    Degreewise matrices ``f(k): source^k -> target^k`` commuting with the
    differentials. Composition is written ``g @ f``.
    """

    __slots__ = ("source", "target", "maps", "_cache")

    def __init__(
        self,
        source: CochainComplex,
        target: CochainComplex,
        maps: Mapping[int, Matrix],
        check: bool = True,
    ) -> None:
        if source.field != target.field:
            raise ShapeMismatch("Endpoints live over different fields")
        self.source = source
        self.target = target
        field = source.field
        self.maps: Dict[int, Matrix] = {}
        for k in range(*_range(source, target)):
            m = maps.get(k)
            shape = (target.dim(k), source.dim(k))
            if m is None:
                m = field.zeros(*shape)
            else:
                m = field.reduce(m)
            if m.shape != shape:
                raise ShapeMismatch(
                    f"Component in degree {k} has shape {m.shape}, expected {shape}",
                    k,
                )
            self.maps[k] = m
        self._cache: Dict[Tuple[str, int], Matrix] = {}
        if check:
            self._validate()

    def _validate(self) -> None:
        field = self.source.field
        for k in range(*_range(self.source, self.target)):
            left = field.mul(self.target.d(k), self(k))
            right = field.mul(self(k + 1), self.source.d(k))
            if not field.equal(left, right):
                raise NotAChainMap(f"Square in degree {k} does not commute", k)

    @property
    def field(self) -> PrimeField:
        return self.source.field

    @property
    def twist_shift(self) -> int:
        return self.target.twist - self.source.twist

    def __call__(self, k: int) -> Matrix:
        m = self.maps.get(k)
        if m is None:
            return self.field.zeros(self.target.dim(k), self.source.dim(k))
        return m

    def __repr__(self) -> str:
        return f"ChainMap({self.source!r} -> {self.target!r})"

    @classmethod
    def identity(cls, complex: CochainComplex) -> "ChainMap":
        field = complex.field
        return cls(
            complex,
            complex,
            {k: field.identity(complex.dim(k)) for k in complex.degrees()},
            check=False,
        )

    @classmethod
    def zero(cls, source: CochainComplex, target: CochainComplex) -> "ChainMap":
        return cls(source, target, {}, check=False)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """
        ``self @ other`` is "first other, then self".
        """
        if other.target.dims != self.source.dims and not _same_shape(other.target, self.source):
            raise ShapeMismatch("Maps are not composable")
        field = self.field
        lo, hi = _range(other.source, self.target)
        return ChainMap(
            other.source,
            self.target,
            {k: field.mul(self(k), other(k)) for k in range(lo, hi)},
            check=False,
        )

    def _pointwise(self, other: "ChainMap", sign: int) -> "ChainMap":
        field = self.field
        lo, hi = _range(self.source, self.target)
        return ChainMap(
            self.source,
            self.target,
            {k: (self(k) + sign * other(k)) % field.ell for k in range(lo, hi)},
            check=False,
        )

    def __add__(self, other: "ChainMap") -> "ChainMap":
        return self._pointwise(other, 1)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self._pointwise(other, -1)

    def __neg__(self) -> "ChainMap":
        return self.scaled(-1)

    def scaled(self, c: int) -> "ChainMap":
        field = self.field
        return ChainMap(
            self.source,
            self.target,
            {k: field.scale(m, c) for k, m in self.maps.items()},
            check=False,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        if not (_same_shape(self.source, other.source) and _same_shape(self.target, other.target)):
            return False
        lo, hi = _range(self.source, self.target)
        return all(self.field.equal(self(k), other(k)) for k in range(lo, hi))

    __hash__ = None  # type: ignore

    def is_zero(self) -> bool:
        return all(self.field.is_zero(m) for m in self.maps.values())

    def with_endpoints(self, source: CochainComplex, target: CochainComplex) -> "ChainMap":
        return ChainMap(source, target, self.maps, check=False)

    # ################################################################
    # cohomology
    # ################################################################

    def induced(self, k: int) -> Matrix:
        """
        Matrix of H^k(f) in the representative bases of source and target.
        """
        key = ("H", k)
        if key not in self._cache:
            reps = self.source.cohomology(k).representatives
            images = self.field.mul(self(k), reps)
            self._cache[key] = self.target.class_of(k, images)
        return self._cache[key]

    def induced_rank(self, k: int) -> int:
        return self.field.rank(self.induced(k))

    def is_quasi_iso(self) -> bool:
        lo, hi = _range(self.source, self.target)
        for k in range(lo, hi):
            m = self.induced(k)
            if m.shape[0] != m.shape[1] or self.field.rank(m) != m.shape[0]:
                return False
        return True

    def image(self) -> "ImageFactorization":
        """
        ``f = inclusion @ corestriction`` through the image subcomplex.
        """
        field = self.field
        lo, hi = _range(self.source, self.target)
        bases = {k: field.image(self(k)) for k in range(lo, hi)}
        dims = [bases[k].shape[1] for k in range(lo, hi)]
        diffs = []
        for k in range(lo, hi - 1):
            moved = field.mul(self.target.d(k), bases[k])
            coords = field.solve(bases[k + 1], moved)
            assert coords is not None, "image of a chain map is a subcomplex"
            diffs.append(coords)
        sub = CochainComplex(field, lo, dims, diffs, self.target.twist, check=False)
        inclusion = ChainMap(sub, self.target, bases, check=False)
        corestriction = {}
        for k in range(lo, hi):
            coords = field.solve(bases[k], self(k))
            assert coords is not None
            corestriction[k] = coords
        return ImageFactorization(
            sub, inclusion, ChainMap(self.source, sub, corestriction, check=False)
        )

    def kernel(self) -> "ImageFactorization":
        """
        The kernel subcomplex with its inclusion into the source; the
        ``corestriction`` slot is unused and holds the zero map.
        """
        field = self.field
        lo, hi = _range(self.source, self.target)
        bases = {k: field.kernel(self(k)) for k in range(lo, hi)}
        dims = [bases[k].shape[1] for k in range(lo, hi)]
        diffs = []
        for k in range(lo, hi - 1):
            moved = field.mul(self.source.d(k), bases[k])
            coords = field.solve(bases[k + 1], moved)
            assert coords is not None, "kernel of a chain map is a subcomplex"
            diffs.append(coords)
        sub = CochainComplex(field, lo, dims, diffs, self.source.twist, check=False)
        inclusion = ChainMap(sub, self.source, bases, check=False)
        return ImageFactorization(sub, inclusion, ChainMap.zero(sub, sub))


def _range(source: CochainComplex, target: CochainComplex) -> Tuple[int, int]:
    lo, hi = _span(source, target)
    return lo, hi + 1


def _same_shape(a: CochainComplex, b: CochainComplex) -> bool:
    lo, hi = _span(a, b)
    return all(a.dim(k) == b.dim(k) for k in range(lo, hi + 1))


class ImageFactorization(NamedTuple):
    complex: CochainComplex
    inclusion: ChainMap
    corestriction: ChainMap


class ConeTriangle(NamedTuple):
    """
    ``C --f--> D --inclusion--> cone(f) --projection--> C[1]``
    """

    complex: CochainComplex
    inclusion: ChainMap
    projection: ChainMap


class DirectSum(NamedTuple):
    complex: CochainComplex
    inclusions: Tuple[ChainMap, ...]
    projections: Tuple[ChainMap, ...]


# ################################################################
# constructions
# ################################################################


def shift(complex: CochainComplex, s: int) -> CochainComplex:
    """
    ``C[s]^k = C^{k+s}`` with differential ``(-1)^s d``.
    """
    field = complex.field
    sign = -1 if s % 2 else 1
    return CochainComplex(
        field,
        complex.lo - s,
        complex.dims,
        [field.scale(d, sign) for d in complex.diffs],
        complex.twist,
        check=False,
    )


def shift_map(f: ChainMap, s: int) -> ChainMap:
    return ChainMap(
        shift(f.source, s),
        shift(f.target, s),
        {k - s: m for k, m in f.maps.items()},
        check=False,
    )


def twist_by(complex: CochainComplex, t: int) -> CochainComplex:
    return complex.with_twist(complex.twist + t)


def cone(f: ChainMap) -> ConeTriangle:
    """
    ``cone(f)^k = C^{k+1} + D^k`` with ``d(c, x) = (-d c, f c + d x)``.
    """
    C, D = f.source, f.target
    field = f.field
    lo = min(C.lo - 1, D.lo)
    hi = max(C.hi - 1, D.hi, lo)
    dims = [C.dim(k + 1) + D.dim(k) for k in range(lo, hi + 1)]
    diffs = []
    for k in range(lo, hi):
        top = np.hstack([field.neg(C.d(k + 1)), field.zeros(C.dim(k + 2), D.dim(k))])
        bottom = np.hstack([f(k + 1), D.d(k)])
        diffs.append(np.vstack([top, bottom]))
    complex = CochainComplex(field, lo, dims, diffs, D.twist, check=False)
    inclusion = {}
    projection = {}
    for k in range(lo, hi + 1):
        inclusion[k] = np.vstack([field.zeros(C.dim(k + 1), D.dim(k)), field.identity(D.dim(k))])
        projection[k] = np.hstack(
            [field.identity(C.dim(k + 1)), field.zeros(C.dim(k + 1), D.dim(k))]
        )
    shifted = shift(C, 1)
    return ConeTriangle(
        complex,
        ChainMap(D, complex, inclusion, check=False),
        ChainMap(complex, shifted.with_twist(D.twist), projection, check=False),
    )


def fiber(f: ChainMap) -> Tuple[CochainComplex, ChainMap]:
    """
    ``fiber(f) = cone(f)[-1]``, so ``fiber^k = C^k + D^{k-1}`` with
    ``d(c, x) = (d c, -f c - d x)``; returned with its projection to C.
    """
    complex = shift(cone(f).complex, -1).with_twist(f.source.twist)
    C, D = f.source, f.target
    field = f.field
    projection = {
        k: np.hstack([field.identity(C.dim(k)), field.zeros(C.dim(k), D.dim(k - 1))])
        for k in complex.degrees()
    }
    return complex, ChainMap(complex, C, projection, check=False)


def direct_sum(*complexes: CochainComplex) -> DirectSum:
    field = complexes[0].field
    lo, hi = _span(*complexes)
    dims = [sum(c.dim(k) for c in complexes) for k in range(lo, hi + 1)]
    diffs = [field.block_diag([c.d(k) for c in complexes]) for k in range(lo, hi)]
    total = CochainComplex(field, lo, dims, diffs, complexes[0].twist, check=False)
    inclusions = []
    projections = []
    for i, c in enumerate(complexes):
        inc = {}
        proj = {}
        for k in range(lo, hi + 1):
            offset = sum(other.dim(k) for other in complexes[:i])
            block = field.zeros(total.dim(k), c.dim(k))
            block[offset : offset + c.dim(k)] = field.identity(c.dim(k))
            inc[k] = block
            proj[k] = np.array(block.T)
        inclusions.append(ChainMap(c, total, inc, check=False))
        projections.append(ChainMap(total, c, proj, check=False))
    return DirectSum(total, tuple(inclusions), tuple(projections))


def sum_maps(maps: Sequence[ChainMap], source: CochainComplex, target: CochainComplex) -> ChainMap:
    """
    Block-diagonal map between direct sums, block ``i`` being ``maps[i]``.
    """
    field = source.field
    lo, hi = _range(source, target)
    return ChainMap(
        source,
        target,
        {k: field.block_diag([m(k) for m in maps]) for k in range(lo, hi)},
        check=False,
    )


def _tensor_blocks(C: CochainComplex, D: CochainComplex, n: int) -> List[Tuple[int, int]]:
    return [(p, n - p) for p in C.degrees() if C.dim(p) and D.dim(n - p)]


def tensor(C: CochainComplex, D: CochainComplex) -> CochainComplex:
    """
    Total complex with ``d(c x) = dc x + (-1)^p c dx``; twists add.
    """
    field = C.field
    lo, hi = C.lo + D.lo, max(C.hi + D.hi, C.lo + D.lo)
    dims = [sum(C.dim(p) * D.dim(q) for p, q in _tensor_blocks(C, D, n)) for n in range(lo, hi + 1)]
    diffs = []
    for n in range(lo, hi):
        sources = _tensor_blocks(C, D, n)
        targets = _tensor_blocks(C, D, n + 1)
        rows = []
        for tp, tq in targets:
            row = []
            for sp, sq in sources:
                shape = (C.dim(tp) * D.dim(tq), C.dim(sp) * D.dim(sq))
                if tp == sp + 1 and tq == sq:
                    row.append(field.kron(C.d(sp), field.identity(D.dim(sq))))
                elif tp == sp and tq == sq + 1:
                    sign = -1 if sp % 2 else 1
                    row.append(field.scale(field.kron(field.identity(C.dim(sp)), D.d(sq)), sign))
                else:
                    row.append(field.zeros(*shape))
            rows.append(row)
        diffs.append(_assemble(field, rows, dims[n - lo + 1], dims[n - lo]))
    return CochainComplex(field, lo, dims, diffs, C.twist + D.twist, check=False)


def tensor_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    source = tensor(f.source, g.source)
    target = tensor(f.target, g.target)
    field = f.field
    maps = {}
    for n in source.degrees():
        sources = _tensor_blocks(f.source, g.source, n)
        targets = _tensor_blocks(f.target, g.target, n)
        rows = []
        for tp, tq in targets:
            row = []
            for sp, sq in sources:
                if (tp, tq) == (sp, sq):
                    row.append(field.kron(f(sp), g(sq)))
                else:
                    row.append(
                        field.zeros(
                            f.target.dim(tp) * g.target.dim(tq),
                            f.source.dim(sp) * g.source.dim(sq),
                        )
                    )
            rows.append(row)
        maps[n] = _assemble(field, rows, target.dim(n), source.dim(n))
    return ChainMap(source, target, maps, check=False)


class MinimalModel(NamedTuple):
    complex: CochainComplex
    # H(C) -> C, each class to its representative cocycle
    inclusion: ChainMap


def minimal_model(C: CochainComplex) -> MinimalModel:
    """
    The cohomology of C with zero differentials and the quasi-isomorphism
    into C through the representatives.
    """
    H = CochainComplex(C.field, C.lo, [C.betti(k) for k in C.degrees()], twist=C.twist, check=False)
    representatives = {k: C.cohomology(k).representatives for k in C.degrees()}
    return MinimalModel(H, ChainMap(H, C, representatives, check=False))


def minimal_map(f: ChainMap, source: CochainComplex, target: CochainComplex) -> ChainMap:
    """
    ``H(f)`` between the minimal models `source` and `target` of its endpoints.
    """
    return ChainMap(source, target, {k: f.induced(k) for k in range(*_range(f.source, f.target))}, check=False)


def _assemble(field: PrimeField, rows: List[List[Matrix]], height: int, width: int) -> Matrix:
    if not rows or not rows[0]:
        return field.zeros(height, width)
    return np.vstack([np.hstack(row) for row in rows]) % field.ell


def _hom_blocks(C: CochainComplex, D: CochainComplex, n: int) -> List[int]:
    return [p for p in C.degrees() if C.dim(p) and D.dim(p + n)]


def hom_complex(C: CochainComplex, D: CochainComplex) -> CochainComplex:
    """
    ``Hom^n = prod_p Hom(C^p, D^{p+n})`` with ``d phi = d_D phi - (-1)^n phi d_C``.
    A component ``phi_p`` is stored row-major.
    """
    field = C.field
    lo, hi = D.lo - C.hi, max(D.hi - C.lo, D.lo - C.hi)
    dims = [sum(C.dim(p) * D.dim(p + n) for p in _hom_blocks(C, D, n)) for n in range(lo, hi + 1)]
    diffs = []
    for n in range(lo, hi):
        sources = _hom_blocks(C, D, n)
        targets = _hom_blocks(C, D, n + 1)
        sign = -1 if n % 2 else 1
        rows = []
        for tp in targets:
            row = []
            for sp in sources:
                shape = (C.dim(tp) * D.dim(tp + n + 1), C.dim(sp) * D.dim(sp + n))
                if sp == tp:
                    # phi_p -> d_D phi_p
                    row.append(field.kron(D.d(sp + n), field.identity(C.dim(sp))))
                elif sp == tp + 1:
                    # phi_{p+1} -> -(-1)^n phi_{p+1} d_C
                    block = field.kron(field.identity(D.dim(sp + n)), C.d(tp).T)
                    row.append(field.scale(block, -sign))
                else:
                    row.append(field.zeros(*shape))
            rows.append(row)
        diffs.append(_assemble(field, rows, dims[n - lo + 1], dims[n - lo]))
    return CochainComplex(field, lo, dims, diffs, D.twist - C.twist, check=False)


def hom_vector(f: ChainMap, degree: int = 0) -> Matrix:
    """
    The column vector of ``Hom^degree(C, D)`` representing the family of
    matrices ``f(p): C^p -> D^{p+degree}`` stored in `f.maps`.
    """
    C, D = f.source, f.target
    parts = [f.maps[p].reshape(-1, 1) for p in _hom_blocks(C, D, degree)]
    if not parts:
        return f.field.zeros(0, 1)
    return np.vstack(parts) % f.field.ell


def unpack_hom(
    C: CochainComplex, D: CochainComplex, degree: int, vector: Matrix
) -> Dict[int, Matrix]:
    out = {}
    offset = 0
    for p in _hom_blocks(C, D, degree):
        rows, cols = D.dim(p + degree), C.dim(p)
        out[p] = np.array(vector[offset : offset + rows * cols, 0]).reshape(rows, cols)
        offset += rows * cols
    return out


def homotopy_between(f: ChainMap, g: ChainMap) -> Optional[Dict[int, Matrix]]:
    """
    Matrices ``h(k): C^k -> D^{k-1}`` with ``f - g = d h + h d``, or None when
    the maps are not homotopic.
    """
    C, D = f.source, f.target
    hom = hom_complex(C, D)
    difference = f - g
    target = hom_vector(difference, 0)
    if target.shape[0] == 0:
        return {}
    solution = f.field.solve(hom.d(-1), target)
    if solution is None:
        return None
    return unpack_hom(C, D, -1, solution)


def truncate_below(complex: CochainComplex, a: int) -> CochainComplex:
    """
    Good truncation: degrees ``< a`` removed and degree ``a`` replaced by
    ``C^a / B^a``, so that ``H^k`` is unchanged for ``k >= a``.
    """
    if a <= complex.lo:
        return complex
    if a > complex.hi:
        return zero_complex(complex.field, complex.twist)
    field = complex.field
    boundaries = field.image(complex.d(a - 1))
    quotient = field.complement(boundaries, complex.dim(a))
    dims = [quotient.shape[1]] + [complex.dim(k) for k in range(a + 1, complex.hi + 1)]
    diffs = [field.mul(complex.d(a), quotient)] + [complex.d(k) for k in range(a + 1, complex.hi)]
    if len(dims) == 1:
        diffs = []
    return CochainComplex(field, a, dims, diffs, complex.twist, check=False)


def quasi_inverse(f: ChainMap) -> ChainMap:
    """
    A chain map ``g`` with ``H(g) = H(f)^{-1}``. It sends the representative
    of each class of the target to a cocycle of the source and kills a
    complement of the cocycles together with the boundaries.
    """
    if not f.is_quasi_iso():
        raise HypothesisFailure("Only quasi-isomorphisms have quasi-inverses", f)
    C, D = f.source, f.target
    field = f.field
    maps = {}
    for k in D.degrees():
        n = D.dim(k)
        if n == 0:
            continue
        boundaries, reps = D._cohomology_data(k)
        cocycles = np.hstack([boundaries, reps])
        rest = field.complement(cocycles, n)
        basis = np.hstack([cocycles, rest])
        coords = field.inverse(basis)
        rep_rows = coords[boundaries.shape[1] : boundaries.shape[1] + reps.shape[1]]
        back = field.inverse(f.induced(k)) if reps.shape[1] else field.zeros(0, 0)
        source_reps = C.cohomology(k).representatives
        maps[k] = field.mul(source_reps, back, rep_rows) if reps.shape[1] else field.zeros(C.dim(k), n)
    return ChainMap(D, C, maps)


def check_cone_sequence(f: ChainMap) -> bool:
    """
    Exactness of ``... -> H^k C -> H^k D -> H^k cone -> H^{k+1} C -> ...``
    by rank bookkeeping at every term.
    """
    triangle = cone(f)
    C, D, E = f.source, f.target, triangle.complex
    lo = min(C.lo, D.lo, E.lo) - 1
    hi = max(C.hi, D.hi, E.hi) + 1
    for k in range(lo, hi + 1):
        r_f = f.induced_rank(k)
        r_i = triangle.inclusion.induced_rank(k)
        r_p = triangle.projection.induced_rank(k)
        r_f_next = f.induced_rank(k + 1)
        r_p_prev = triangle.projection.induced_rank(k - 1)
        if r_p_prev + r_f != C.betti(k):
            return False
        if r_f + r_i != D.betti(k):
            return False
        if r_i + r_p != E.betti(k):
            return False
        if r_p + r_f_next != C.betti(k + 1):
            return False
    return True


# ################################################################
# sampling
# ################################################################


def random_complex(
    field: PrimeField, rng: np.random.Generator, lo: int, dims: Sequence[int], twist: int = 0
) -> CochainComplex:
    """
    A random complex with the given dimensions: each differential is a
    random matrix whose rows annihilate the previous boundaries.
    """
    diffs = []
    previous = field.zeros(dims[0], 0) if dims else None
    for i in range(len(dims) - 1):
        annihilator = field.kernel(previous.T).T if previous is not None else field.identity(dims[i])
        d = field.mul(field.random(rng, dims[i + 1], annihilator.shape[0]), annihilator)
        diffs.append(d)
        previous = field.image(d)
    return CochainComplex(field, lo, dims, diffs, twist)


def random_chain_map(
    source: CochainComplex, target: CochainComplex, rng: np.random.Generator
) -> ChainMap:
    """
    A random combination of a basis of degree-0 cocycles of Hom(source, target).
    """
    field = source.field
    hom = hom_complex(source, target)
    cycles = field.kernel(hom.d(0))
    if hom.dim(0) == 0 or cycles.shape[1] == 0:
        return ChainMap.zero(source, target)
    vector = field.mul(cycles, field.random(rng, cycles.shape[1], 1))
    return ChainMap(source, target, unpack_hom(source, target, 0, vector))


def from_rows(
    field: PrimeField, lo: int, dims: Sequence[int], rows: Iterable[Iterable[Iterable[int]]], twist: int = 0
) -> CochainComplex:
    matrices = [
        field.matrix(r, (dims[i + 1], dims[i])) for i, r in enumerate(rows)
    ]
    return CochainComplex(field, lo, dims, matrices, twist)


def cone_map(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    """
    ``cone(f) -> cone(g)`` induced by a strictly commuting square
    ``b f = g a``, acting as ``(c, x) -> (a c, b x)``.
    """
    source, target = cone(f).complex, cone(g).complex
    field = f.field
    maps = {
        k: field.block_diag([a(k + 1), b(k)])
        for k in range(*_range(source, target))
    }
    return ChainMap(source, target, maps, check=False)


def fiber_map(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    source, target = fiber(f)[0], fiber(g)[0]
    field = f.field
    maps = {
        k: field.block_diag([a(k), b(k - 1)])
        for k in range(*_range(source, target))
    }
    return ChainMap(source, target, maps, check=False)


def triangle_map(
    f: ChainMap, v: ChainMap, homotopy: Optional[Mapping[int, Matrix]] = None
) -> ChainMap:
    """
    For ``A --f--> B --v--> C`` with ``v f = d h + h d`` (``h = 0`` when
    omitted) the map ``cone(f) -> C``, ``(a, b) -> v b + h a``. The
    triangle is exact exactly when this map is a quasi-isomorphism.
    """
    A, B, C = f.source, f.target, v.target
    source = cone(f).complex
    field = f.field
    maps = {}
    for k in source.degrees():
        h = homotopy.get(k + 1) if homotopy else None
        if h is None:
            h = field.zeros(C.dim(k), A.dim(k + 1))
        maps[k] = np.hstack([h, v(k)]) % field.ell
    return ChainMap(source, C, maps)


def quotient(inclusion: ChainMap) -> Tuple[CochainComplex, ChainMap]:
    """
    ``D / E`` for an injective chain map ``E -> D``, modelled on a
    complement of the image, with the projection ``D -> D / E``.
    """
    D = inclusion.target
    field = inclusion.field
    lifts = {}
    projections = {}
    for k in D.degrees():
        sub = field.image(inclusion(k))
        rest = field.complement(sub, D.dim(k))
        coords = field.inverse(np.hstack([sub, rest])) if D.dim(k) else field.zeros(0, 0)
        lifts[k] = rest
        projections[k] = np.array(coords[sub.shape[1] :], dtype=np.int64)
    dims = [lifts[k].shape[1] for k in D.degrees()]
    diffs = [field.mul(projections[k + 1], D.d(k), lifts[k]) for k in range(D.lo, D.hi)]
    complex = CochainComplex(field, D.lo, dims, diffs, D.twist, check=False)
    return complex, ChainMap(D, complex, projections, check=False)
