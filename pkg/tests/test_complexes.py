import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tamecycles.complexes import (
    ChainMap,
    CochainComplex,
    check_cone_sequence,
    concentrated,
    cone,
    direct_sum,
    fiber,
    hom_complex,
    homotopy_between,
    quasi_inverse,
    quotient,
    random_chain_map,
    random_complex,
    shift,
    tensor,
    triangle_map,
    truncate_below,
    unit_complex,
)
from tamecycles.exceptions import HypothesisFailure, NotAChainMap, ShapeMismatch
from tamecycles.linalg import PrimeField


@st.composite
def complexes(draw, max_length=4, max_dim=3, field=None):
    if field is None:
        field = PrimeField(draw(st.sampled_from([2, 3, 5])))
    lo = draw(st.integers(-2, 2))
    dims = draw(st.lists(st.integers(0, max_dim), min_size=1, max_size=max_length))
    seed = draw(st.integers(0, 2**16))
    return random_complex(field, np.random.default_rng(seed), lo, dims)


@st.composite
def pairs(draw, max_length=3, max_dim=2):
    field = PrimeField(draw(st.sampled_from([2, 3, 5])))
    return (
        draw(complexes(max_length, max_dim, field)),
        draw(complexes(max_length, max_dim, field)),
    )


def circle(F: PrimeField) -> CochainComplex:
    return CochainComplex(F, 0, [1, 1])


def test_cohomology_of_small_complexes():
    F = PrimeField(3)
    assert circle(F).cohomology_table() == {0: 1, 1: 1}
    iso = CochainComplex(F, 0, [1, 1], [F.matrix([[2]])])
    assert iso.is_acyclic()
    assert unit_complex(F).cohomology_table() == {0: 1}
    assert concentrated(F, 2, 3, twist=-1).cohomology_table() == {2: 3}


def test_differentials_checked():
    F = PrimeField(2)
    with pytest.raises(ShapeMismatch):
        CochainComplex(F, 0, [1, 1], [F.matrix([[1, 1]])])
    with pytest.raises(NotAChainMap):
        CochainComplex(F, 0, [1, 1, 1], [F.matrix([[1]]), F.matrix([[1]])])


def test_chain_map_squares_checked():
    F = PrimeField(5)
    point = unit_complex(F)
    iso = CochainComplex(F, 0, [1, 1], [F.matrix([[1]])])
    with pytest.raises(NotAChainMap):
        ChainMap(point, iso, {0: F.matrix([[1]])})
    # the other direction commutes since the point has nothing in degree 1
    ChainMap(iso, point, {0: F.matrix([[1]])})


@given(complexes())
@settings(max_examples=40, deadline=None)
def test_euler_characteristic_matches_cohomology(C):
    table = C.cohomology_table()
    assert sum((-1) ** (k % 2) * b for k, b in table.items()) == C.euler_characteristic()


@given(complexes(), st.integers(-2, 2))
@settings(max_examples=30, deadline=None)
def test_shift_moves_cohomology(C, s):
    shifted = shift(C, s)
    for k in C.degrees():
        assert shifted.betti(k - s) == C.betti(k)


def test_cone_of_identity_is_acyclic():
    F = PrimeField(3)
    C = circle(F)
    assert cone(ChainMap.identity(C)).complex.is_acyclic()


def test_cone_and_fiber_of_zero_map():
    F = PrimeField(3)
    C, D = circle(F), unit_complex(F)
    zero = ChainMap.zero(C, D)
    # H(cone) = H(D) + H(C[1])
    assert cone(zero).complex.cohomology_table() == {-1: 1, 0: 2}
    complex, projection = fiber(zero)
    assert complex.cohomology_table() == {0: 1, 1: 2}
    assert projection.target is C


@given(pairs(), st.integers(0, 2**16))
@settings(max_examples=30, deadline=None)
def test_cone_sequence_is_exact(pair, seed):
    C, D = pair
    f = random_chain_map(C, D, np.random.default_rng(seed))
    assert check_cone_sequence(f)


@given(pairs())
@settings(max_examples=25, deadline=None)
def test_kunneth_over_a_field(pair):
    C, D = pair
    T = tensor(C, D)
    for n in T.degrees():
        expected = sum(C.betti(p) * D.betti(n - p) for p in C.degrees())
        assert T.betti(n) == expected


def test_tensor_adds_twists():
    F = PrimeField(2)
    assert tensor(concentrated(F, 0, 1, twist=1), concentrated(F, 2, 1, twist=-3)).twist == -2


@given(complexes(max_length=3, max_dim=2))
@settings(max_examples=25, deadline=None)
def test_endomorphisms_up_to_homotopy(C):
    hom = hom_complex(C, C)
    assert hom.betti(0) == sum(C.betti(p) ** 2 for p in C.degrees())


@given(complexes(), st.integers(-3, 4))
@settings(max_examples=30, deadline=None)
def test_truncation_keeps_high_degrees(C, a):
    truncated = truncate_below(C, a)
    for k in range(min(C.lo, a) - 1, C.hi + 2):
        assert truncated.betti(k) == (C.betti(k) if k >= a else 0)


def test_direct_sum_splits():
    F = PrimeField(5)
    C, D = circle(F), concentrated(F, 1, 2)
    total = direct_sum(C, D)
    assert total.complex.cohomology_table() == {0: 1, 1: 3}
    for inc, proj in zip(total.inclusions, total.projections):
        assert proj @ inc == ChainMap.identity(inc.source)


def test_homotopies():
    F = PrimeField(3)
    iso = CochainComplex(F, 0, [1, 1], [F.matrix([[1]])])
    h = homotopy_between(ChainMap.identity(iso), ChainMap.zero(iso, iso))
    assert h is not None
    point = unit_complex(F)
    assert homotopy_between(ChainMap.identity(point), ChainMap.zero(point, point)) is None
    assert homotopy_between(ChainMap.identity(point), ChainMap.identity(point)) is not None


def test_quasi_inverse():
    F = PrimeField(3)
    D = CochainComplex(F, 0, [2, 1], [F.matrix([[1, 0]])])
    point = unit_complex(F)
    f = ChainMap(point, D, {0: F.matrix([[0], [1]])})
    assert f.is_quasi_iso()
    g = quasi_inverse(f)
    assert F.equal((g @ f).induced(0), F.identity(1))
    assert F.equal((f @ g).induced(0), F.identity(1))
    with pytest.raises(HypothesisFailure):
        quasi_inverse(ChainMap.zero(point, D))


def test_quotient_triangle_is_exact():
    F = PrimeField(2)
    A, B = unit_complex(F), concentrated(F, 0, 2)
    f = ChainMap(A, B, {0: F.matrix([[1], [0]])})
    Q, v = quotient(f)
    assert Q.cohomology_table() == {0: 1}
    assert (v @ f).is_zero()
    assert triangle_map(f, v).is_quasi_iso()
