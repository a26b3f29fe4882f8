import numpy as np
import pytest

from tamecycles.complexes import ChainMap, concentrated, unit_complex
from tamecycles.exceptions import NaturalityFailure, NotFunctorial
from tamecycles.linalg import PrimeField
from tamecycles.posets import FinitePoset, OpenClosedDecomposition, chain_poset, pseudocircle, pseudodisk
from tamecycles.sheaves import (
    SheafComplex,
    SheafMap,
    closed_pushforward,
    closed_unit,
    constant_sheaf,
    point_injective,
    random_sheaf,
    sections,
    sheaf_cone,
    sheaf_direct_sum,
    shriek_counit,
    shriek_extension,
    skyscraper,
    twist_sheaf,
    unit_sheaf,
    up_constant,
)

F3 = PrimeField(3)


def diamond() -> FinitePoset:
    return FinitePoset(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])


def test_missing_restriction():
    P = chain_poset(1)
    stalks = {x: unit_complex(F3) for x in P}
    with pytest.raises(NotFunctorial):
        SheafComplex(P, stalks, {})


def test_restrictions_must_compose():
    P = diamond()
    L = unit_complex(F3)
    one = ChainMap.identity(L)
    restrictions = {pair: one for pair in P.covers}
    SheafComplex(P, {x: L for x in P}, restrictions)
    restrictions[("b", "1")] = one.scaled(2)
    with pytest.raises(NotFunctorial):
        SheafComplex(P, {x: L for x in P}, restrictions)


def test_restriction_composites():
    F = unit_sheaf(chain_poset(2), F3)
    assert F.restriction(0, 2) == ChainMap.identity(F[0])
    with pytest.raises(NotFunctorial):
        F.restriction(2, 0)


def test_naturality_checked():
    P = chain_poset(1)
    F = unit_sheaf(P, F3)
    with pytest.raises(NaturalityFailure):
        SheafMap(F, F, {0: ChainMap.identity(F[0])})
    assert SheafMap.identity(F) @ SheafMap.identity(F) == SheafMap.identity(F)


def test_underived_sections_count_components():
    S = pseudocircle(2)
    F = unit_sheaf(S, F3)
    assert sections(F, S.elements).cohomology_table() == {0: 1}
    assert sections(F, ["s1", "s3"]).cohomology_table() == {0: 2}
    assert sections(F, []).is_acyclic()


def test_supported_sheaves():
    D = pseudodisk(2)
    V = concentrated(F3, 1, 2)
    sky = skyscraper(D, "s1", V)
    assert sky.stalk_tables()["s1"] == {1: 2}
    assert sky["0"].total_dimension() == 0
    injective = point_injective(D, "s1", V)
    assert {x for x in D if injective[x].total_dimension()} == {"0", "s0", "s1", "s2"}
    extended = up_constant(D, "s0", V)
    assert {x for x in D if extended[x].total_dimension()} == {"s0", "s1", "s3"}


def test_open_closed_extensions():
    D = pseudodisk(2)
    decomposition = OpenClosedDecomposition(D, ["0"])
    F = unit_sheaf(D, F3)
    counit = shriek_counit(decomposition, F)
    assert counit.source["0"].total_dimension() == 0
    assert counit("s1").is_quasi_iso()
    unit = closed_unit(decomposition, F)
    assert unit.target["s1"].total_dimension() == 0
    assert unit("0").is_quasi_iso()
    restricted = unit_sheaf(decomposition.open, F3)
    assert shriek_extension(decomposition, restricted)["0"].total_dimension() == 0
    assert closed_pushforward(decomposition, unit_sheaf(decomposition.closed, F3))["s2"].total_dimension() == 0


def test_cone_of_identity_is_acyclic():
    F = constant_sheaf(pseudocircle(2), concentrated(F3, 0, 2))
    assert sheaf_cone(SheafMap.identity(F)).sheaf.is_acyclic()


def test_direct_sum_and_twist():
    S = pseudocircle(2)
    total = sheaf_direct_sum(unit_sheaf(S, F3), twist_sheaf(unit_sheaf(S, F3), 0))
    assert total.sheaf.stalk_tables()["s0"] == {0: 2}
    assert twist_sheaf(unit_sheaf(S, F3), -1).twist == -1


@pytest.mark.parametrize("seed", range(5))
def test_random_sheaves_are_functors(seed):
    rng = np.random.default_rng(seed)
    P = pseudodisk(2)
    F = random_sheaf(F3, P, rng, generators=2, max_dim=1)
    # re-validating raises if the restrictions do not compose
    SheafComplex(P, F.stalks, {pair: F.restriction(*pair) for pair in P.covers})
