"""
Exact linear algebra over a prime field.

Matrices are `numpy.int64` arrays holding residues in ``[0, ell)``. Every
function returns a fresh array, entries reduced, never a view of its input.
Elimination and inversion run on `galois` field arrays.
"""
import logging
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Type

import galois
import numpy as np

try:
    from mypy_extensions import mypyc_attr
except ImportError:  # pragma: no cover

    def mypyc_attr(*attrs, **kwattrs):  # type: ignore
        return lambda x: x


from .exceptions import NotPrime, ShapeMismatch
from .utils import is_prime

logger = logging.getLogger(__name__)

Matrix = np.ndarray

__all__ = ["Matrix", "PrimeField"]


@lru_cache(maxsize=None)
def _galois_field(ell: int) -> Type[galois.FieldArray]:
    return galois.GF(ell)


@mypyc_attr(allow_interpreted_subclasses=True)
class PrimeField:
    """
    The coefficient field F_ell.

    ```python
    F = PrimeField(3)
    F.rank(F.matrix([[1, 2], [2, 1]]))  # 1
    ```
    """

    __slots__ = ("ell",)

    def __init__(self, ell: int) -> None:
        if not is_prime(ell):
            raise NotPrime(ell)
        self.ell = ell

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.ell == self.ell

    def __hash__(self) -> int:
        return hash(("PrimeField", self.ell))

    def __repr__(self) -> str:
        return f"PrimeField({self.ell})"

    @property
    def galois_field(self) -> Type[galois.FieldArray]:
        return _galois_field(self.ell)

    def lift(self, a: Matrix) -> galois.FieldArray:
        return self.galois_field(self.reduce(a))

    def lower(self, a: galois.FieldArray) -> Matrix:
        return np.array(a.view(np.ndarray), dtype=np.int64)

    # ################################################################
    # constructors
    # ################################################################

    def matrix(
        self, rows: Iterable[Iterable[int]], shape: Optional[Tuple[int, int]] = None
    ) -> Matrix:
        data = [list(row) for row in rows]
        if shape is not None and not data:
            return self.zeros(*shape)
        array = np.array(data, dtype=np.int64)
        if array.ndim != 2:
            array = array.reshape(len(data), -1)
        if shape is not None and array.shape != shape:
            raise ShapeMismatch(
                f"Expected a {shape[0]}x{shape[1]} matrix, got {array.shape}",
                (shape, array.shape),
            )
        return array % self.ell

    def zeros(self, rows: int, cols: int) -> Matrix:
        return np.zeros((rows, cols), dtype=np.int64)

    def identity(self, n: int) -> Matrix:
        return np.eye(n, dtype=np.int64)

    def scalar(self, n: int, value: int) -> Matrix:
        return (np.eye(n, dtype=np.int64) * (value % self.ell)) % self.ell

    def reduce(self, a: Matrix) -> Matrix:
        return np.asarray(a, dtype=np.int64) % self.ell

    def random(self, rng: np.random.Generator, rows: int, cols: int) -> Matrix:
        return rng.integers(0, self.ell, size=(rows, cols), dtype=np.int64)

    # ################################################################
    # arithmetic
    # ################################################################

    def inv(self, x: int) -> int:
        x %= self.ell
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.galois_field(x) ** -1)

    def mul(self, *factors: Matrix) -> Matrix:
        result = factors[0]
        for factor in factors[1:]:
            if result.shape[1] != factor.shape[0]:
                raise ShapeMismatch(
                    f"Cannot compose {result.shape} with {factor.shape}",
                    (result.shape, factor.shape),
                )
            result = (result @ factor) % self.ell
        return np.array(result, dtype=np.int64) % self.ell

    def add(self, *terms: Matrix) -> Matrix:
        result = np.zeros_like(terms[0])
        for term in terms:
            result = (result + term) % self.ell
        return result

    def sub(self, a: Matrix, b: Matrix) -> Matrix:
        return (a - b) % self.ell

    def neg(self, a: Matrix) -> Matrix:
        return (-a) % self.ell

    def scale(self, a: Matrix, c: int) -> Matrix:
        return (a * (c % self.ell)) % self.ell

    def kron(self, a: Matrix, b: Matrix) -> Matrix:
        return np.kron(a, b) % self.ell

    def power(self, a: Matrix, n: int) -> Matrix:
        result = self.identity(a.shape[0])
        base = a % self.ell
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def hstack(self, blocks: Sequence[Matrix], rows: int) -> Matrix:
        blocks = [b for b in blocks if b.shape[1]]
        if not blocks:
            return self.zeros(rows, 0)
        return np.hstack(blocks) % self.ell

    def vstack(self, blocks: Sequence[Matrix], cols: int) -> Matrix:
        blocks = [b for b in blocks if b.shape[0]]
        if not blocks:
            return self.zeros(0, cols)
        return np.vstack(blocks) % self.ell

    def block_diag(self, blocks: Sequence[Matrix]) -> Matrix:
        rows = sum(b.shape[0] for b in blocks)
        cols = sum(b.shape[1] for b in blocks)
        out = self.zeros(rows, cols)
        r = c = 0
        for b in blocks:
            out[r : r + b.shape[0], c : c + b.shape[1]] = b
            r += b.shape[0]
            c += b.shape[1]
        return out

    # ################################################################
    # elimination
    # ################################################################

    def rref(self, a: Matrix) -> Tuple[Matrix, List[int]]:
        """
        Reduced row echelon form and the pivot columns.
        """
        m = self.reduce(a)
        if m.size == 0:
            return m, []
        reduced = self.lower(self.galois_field(m).row_reduce())
        pivots = [int(np.flatnonzero(row)[0]) for row in reduced if row.any()]
        return reduced, pivots

    def rank(self, a: Matrix) -> int:
        if a.size == 0:
            return 0
        return len(self.rref(a)[1])

    def kernel(self, a: Matrix) -> Matrix:
        """
        Basis of the null space, as columns.
        """
        cols = a.shape[1]
        if a.shape[0] == 0:
            return self.identity(cols)
        reduced, pivots = self.rref(a)
        free = [c for c in range(cols) if c not in set(pivots)]
        basis = self.zeros(cols, len(free))
        for j, f in enumerate(free):
            basis[f, j] = 1
            for i, p in enumerate(pivots):
                basis[p, j] = (-reduced[i, f]) % self.ell
        return basis

    def image(self, a: Matrix) -> Matrix:
        """
        Basis of the column space, taken among the columns of `a`.
        """
        if a.size == 0:
            return self.zeros(a.shape[0], 0)
        _, pivots = self.rref(a)
        return np.array(a[:, pivots], dtype=np.int64) % self.ell

    def pivot_columns(self, a: Matrix) -> List[int]:
        if a.size == 0:
            return []
        return self.rref(a)[1]

    def solve(self, a: Matrix, b: Matrix) -> Optional[Matrix]:
        """
        A solution `x` of `a @ x == b`, or None when there is none.
        """
        rows, cols = a.shape
        if b.shape[0] != rows:
            raise ShapeMismatch("Right hand side has the wrong height", (a.shape, b.shape))
        if rows == 0:
            return self.zeros(cols, b.shape[1])
        reduced, pivots = self.rref(np.hstack([a, b]))
        if any(p >= cols for p in pivots):
            return None
        x = self.zeros(cols, b.shape[1])
        for i, p in enumerate(pivots):
            x[p] = reduced[i, cols:]
        return x

    def inverse(self, a: Matrix) -> Matrix:
        n = a.shape[0]
        if a.shape != (n, n):
            raise ShapeMismatch("Only square matrices are invertible", a.shape)
        if n == 0:
            return self.zeros(0, 0)
        try:
            return self.lower(np.linalg.inv(self.lift(a)))
        except np.linalg.LinAlgError as e:
            raise ZeroDivisionError("Matrix is singular") from e

    def is_invertible(self, a: Matrix) -> bool:
        return a.shape[0] == a.shape[1] and self.rank(a) == a.shape[0]

    def complement(self, basis: Matrix, dim: int) -> Matrix:
        """
        Standard basis vectors completing the columns of `basis` to a basis
        of F_ell^dim.
        """
        pivots = self.pivot_columns(np.hstack([basis, self.identity(dim)]))
        chosen = [p - basis.shape[1] for p in pivots if p >= basis.shape[1]]
        return np.array(self.identity(dim)[:, chosen], dtype=np.int64)

    def extension(self, sub: Matrix, vectors: Matrix) -> Matrix:
        """
        Columns of `vectors` that extend a basis of span(`sub`) to a basis of
        span(`sub`, `vectors`).
        """
        pivots = self.pivot_columns(np.hstack([sub, vectors]))
        chosen = [p - sub.shape[1] for p in pivots if p >= sub.shape[1]]
        return np.array(vectors[:, chosen], dtype=np.int64)

    def equal(self, a: Matrix, b: Matrix) -> bool:
        return a.shape == b.shape and bool(np.all((a - b) % self.ell == 0))

    def is_zero(self, a: Matrix) -> bool:
        return bool(np.all(a % self.ell == 0))
