import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tamecycles.exceptions import NotPrime, ShapeMismatch
from tamecycles.linalg import PrimeField

primes = st.sampled_from([2, 3, 5, 7])


@st.composite
def matrices(draw, max_side=5):
    ell = draw(primes)
    rows = draw(st.integers(0, max_side))
    cols = draw(st.integers(0, max_side))
    values = draw(st.lists(st.integers(0, ell - 1), min_size=rows * cols, max_size=rows * cols))
    return PrimeField(ell), np.array(values, dtype=np.int64).reshape(rows, cols)


def test_rejects_composite():
    with pytest.raises(NotPrime):
        PrimeField(4)


def test_matrix_shape_checked():
    F = PrimeField(3)
    assert F.matrix([[4, -1]]).tolist() == [[1, 2]]
    assert F.matrix([], (0, 2)).shape == (0, 2)
    with pytest.raises(ShapeMismatch):
        F.matrix([[1, 2]], (2, 1))
    with pytest.raises(ShapeMismatch):
        F.mul(F.identity(2), F.identity(3))


def test_docstring_example():
    F = PrimeField(3)
    assert F.rank(F.matrix([[1, 2], [2, 1]])) == 1
    assert PrimeField(5).rank(PrimeField(5).matrix([[1, 2], [2, 1]])) == 2


def test_inverse_and_power():
    F = PrimeField(5)
    a = F.matrix([[1, 2], [3, 4]])
    assert F.equal(F.mul(a, F.inverse(a)), F.identity(2))
    swap = F.matrix([[0, 1], [1, 0]])
    assert F.equal(F.power(swap, 2), F.identity(2))
    assert F.inv(2) == 3
    with pytest.raises(ZeroDivisionError):
        F.inverse(F.matrix([[1, 1], [1, 1]]))


def test_rref_on_residue_arrays():
    F = PrimeField(3)
    reduced, pivots = F.rref(F.matrix([[0, 2, 1], [0, 1, 2], [1, 0, 0]]))
    assert reduced.dtype == np.int64
    assert reduced.tolist() == [[1, 0, 0], [0, 1, 2], [0, 0, 0]]
    assert pivots == [0, 1]
    assert F.inverse(F.zeros(0, 0)).shape == (0, 0)


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_rank_nullity(data):
    F, a = data
    kernel = F.kernel(a)
    assert F.rank(a) + kernel.shape[1] == a.shape[1]
    assert F.is_zero(F.mul(a, kernel)) if a.shape[0] and kernel.shape[1] else True
    assert F.image(a).shape[1] == F.rank(a)


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_solve_recovers_a_preimage(data):
    F, a = data
    x = np.ones((a.shape[1], 1), dtype=np.int64)
    b = F.mul(a, x) if a.shape[0] and a.shape[1] else F.zeros(a.shape[0], 1)
    solution = F.solve(a, b)
    assert solution is not None
    if a.shape[1]:
        assert F.equal(F.mul(a, solution), b)


def test_solve_detects_inconsistency():
    F = PrimeField(2)
    assert F.solve(F.matrix([[1], [1]]), F.matrix([[0], [1]])) is None


def test_complement_completes_a_basis():
    F = PrimeField(3)
    basis = F.matrix([[1], [1], [0]])
    extra = F.complement(basis, 3)
    assert extra.shape == (3, 2)
    assert F.rank(np.hstack([basis, extra])) == 3


def test_block_diag_and_stacks():
    F = PrimeField(7)
    d = F.block_diag([F.identity(1), F.scalar(2, 3)])
    assert d.tolist() == [[1, 0, 0], [0, 3, 0], [0, 0, 3]]
    assert F.hstack([], 2).shape == (2, 0)
    assert F.vstack([F.zeros(0, 3)], 3).shape == (0, 3)
