import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tamecycles.exceptions import HypothesisFailure, NotAPartialOrder, NotDownClosed, NotMonotone, NotUpClosed
from tamecycles.posets import (
    FinitePoset,
    MonotoneMap,
    OpenClosedDecomposition,
    chain_poset,
    covering_map,
    deck_generator,
    disk_transition,
    is_isomorphism,
    opposite_poset,
    poset_pullback,
    product_poset,
    pseudocircle,
    pseudodisk,
    random_poset,
    theta_map,
)


def test_transitive_closure_and_docstring():
    P = FinitePoset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert P.leq("a", "c")
    assert not P.leq("c", "a")
    assert P.covers == [("a", "b"), ("b", "c")]
    assert P.up("b") == {"b", "c"}
    assert P.down("b") == {"a", "b"}


def test_rejects_cycles_and_unknown_elements():
    with pytest.raises(NotAPartialOrder):
        FinitePoset(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(NotAPartialOrder):
        FinitePoset(["a"], [("a", "z")])
    with pytest.raises(NotAPartialOrder):
        FinitePoset(["a", "a"])


def test_pseudocircle_shape():
    S = pseudocircle(3)
    assert len(S) == 6
    assert S.minimal_elements == ["s0", "s2", "s4"]
    assert S.maximal_elements == ["s1", "s3", "s5"]
    assert S.leq("s0", "s5")
    assert len(S.covers) == 6
    assert len(S.components) == 1
    with pytest.raises(HypothesisFailure) as info:
        pseudocircle(1)
    assert info.value.content == 1


def test_pseudodisk_has_a_minimum():
    D = pseudodisk(2)
    assert D.minimal_elements == ["0"]
    assert D.height == 3
    assert D.up("0") == set(D.elements)


def test_opens_and_closeds():
    D = pseudodisk(2)
    assert D.is_up_closed(["s1", "s3"])
    assert D.is_down_closed(["0"])
    with pytest.raises(NotUpClosed):
        D.check_open(["0"])
    with pytest.raises(NotDownClosed):
        D.check_closed(["s1"])
    assert D.up_closure(["s0"]) == {"s0", "s1", "s3"}
    assert D.down_closure(["s1"]) == {"0", "s0", "s1", "s2"}


def test_decomposition():
    D = pseudodisk(2)
    decomposition = OpenClosedDecomposition(D, ["0"])
    assert set(decomposition.open) == set(pseudocircle(2))
    assert decomposition.i.is_closed_inclusion()
    assert decomposition.j.is_open_inclusion()
    same = OpenClosedDecomposition.from_open(D, decomposition.open.elements)
    assert set(same.closed) == {"0"}


def test_chains():
    P = chain_poset(2)
    assert P.chains() == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
    assert len(P.chains_of_length(1)) == 6
    assert len(P.chains_of_length(1, weak=False)) == 3


def test_monotone_maps_checked():
    P = chain_poset(1)
    with pytest.raises(NotMonotone):
        MonotoneMap(P, P, {0: 1, 1: 0})
    with pytest.raises(NotMonotone):
        MonotoneMap(P, P, {0: 0, 1: 7})
    f = MonotoneMap(P, P, {0: 1, 1: 1})
    assert (f @ f) == f
    assert not f.is_injective()


def test_coverings_and_deck_group():
    cover = covering_map(2, 3)
    assert cover.is_covering_like()
    g = deck_generator(2, 3)
    assert cover @ g == cover
    assert g @ g @ g == MonotoneMap.identity(g.source)
    assert is_isomorphism(g)
    # the disk map is not a covering over the origin
    assert not theta_map(2, 3).is_covering_like()


def test_disk_transitions_compose():
    assert disk_transition(2, 1, 2) @ disk_transition(2, 2, 3) == disk_transition(2, 1, 6)
    assert disk_transition(2, 1, 3) == theta_map(2, 3)


def test_pullback_of_cover_along_itself():
    cover = covering_map(2, 2)
    pullback = poset_pullback(cover, cover)
    # two sheets over a degree 2 cover
    assert len(pullback.poset) == 2 * len(cover.source)
    assert len(pullback.poset.components) == 2
    assert cover @ pullback.left == cover @ pullback.right


def test_product_and_opposite():
    P = chain_poset(1)
    square = product_poset(P, P).poset
    assert len(square) == 4
    assert square.leq((0, 0), (1, 1))
    assert not square.leq((0, 1), (1, 0))
    op = opposite_poset(P)
    assert op.leq(1, 0)
    assert opposite_poset(op) == P


@given(st.integers(0, 2**16), st.integers(1, 7))
@settings(max_examples=40, deadline=None)
def test_random_posets_are_orders(seed, size):
    P = random_poset(np.random.default_rng(seed), size)
    assert len(P) == size
    for x in P:
        for y in P:
            if P.leq(x, y) and P.leq(y, x):
                assert x == y
    for x, y in P.covers:
        assert P.lt(x, y)
    assert P.canonical() == P
