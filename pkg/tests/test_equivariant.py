import pytest

from tamecycles.complexes import ChainMap, concentrated, unit_complex
from tamecycles.equivariant import (
    ChernDatum,
    CyclicAction,
    DivisibilityDiagram,
    LevelSystem,
    categorical_lemma_check,
    check_triv_adjunction,
    chern_colimit,
    colimit,
    descends,
    effective_order,
    fixed_points,
    homotopy_fixed_points,
    inflate,
    level_cone,
    matrix_order,
    regular_system,
    tame_levels,
    triv,
    triv_counit,
)
from tamecycles.exceptions import HypothesisFailure, NonTameOrder, NotStabilized
from tamecycles.linalg import PrimeField
from tamecycles.posets import pseudocircle
from tamecycles.sheaves import unit_sheaf

F2 = PrimeField(2)
F3 = PrimeField(3)


def swap(field: PrimeField) -> CyclicAction:
    C = concentrated(field, 0, 2)
    return CyclicAction(2, ChainMap(C, C, {0: field.matrix([[0, 1], [1, 0]])}))


def test_generator_order_checked():
    C = concentrated(F3, 0, 2)
    g = ChainMap(C, C, {0: F3.matrix([[0, 1], [1, 0]])})
    with pytest.raises(HypothesisFailure):
        CyclicAction(3, g)
    with pytest.raises(HypothesisFailure):
        CyclicAction(0, g)
    assert CyclicAction(4, g).power(3) == g


def test_fixed_points_of_a_swap():
    fixed = fixed_points(swap(F3), 2)
    assert fixed.action.obj.cohomology_table() == {0: 1}
    assert fixed.action.n == 1
    assert fixed.projection @ fixed.inclusion == ChainMap.identity(fixed.action.obj)
    with pytest.raises(NonTameOrder):
        fixed_points(swap(F2), 2)
    with pytest.raises(HypothesisFailure):
        fixed_points(swap(F3), 3)


def test_fixed_points_of_a_subgroup():
    action = inflate(swap(F3), 2)
    assert action.n == 4
    # the subgroup of order 2 inside Z/4 acts trivially
    assert fixed_points(action, 2).action.obj.cohomology_table() == {0: 2}


def test_triv_adjunction():
    assert check_triv_adjunction(concentrated(F3, 1, 2), swap(F3)) == (True, True)


def test_homotopy_fixed_points_tame_and_wild():
    tame = homotopy_fixed_points(CyclicAction.trivial(2, unit_complex(F3)), 0, 4)
    assert tame.window == (0, 3)
    assert {k: v for k, v in tame.complex.cohomology_table().items() if k <= 3} == {0: 1}
    wild = homotopy_fixed_points(CyclicAction.trivial(2, unit_complex(F2)), 0, 4)
    for k in range(0, 4):
        assert wild.complex.betti(k) == 1
    with pytest.raises(HypothesisFailure):
        homotopy_fixed_points(swap(F3), 2, 1)


def test_orders():
    assert matrix_order(F3, F3.matrix([[0, 1], [1, 0]]), 5) == 2
    assert matrix_order(F3, F3.matrix([[1, 1], [0, 1]]), 2) == 0
    assert effective_order(CyclicAction.trivial(6, unit_complex(F3))) == 1
    assert effective_order(inflate(swap(F3), 3)) == 2


def test_level_sets_are_checked():
    C = unit_complex(F3)
    with pytest.raises(HypothesisFailure):
        triv(C, [2, 4])
    with pytest.raises(HypothesisFailure):
        triv(C, [1, 2, 3])
    assert triv(C, [1, 2, 3, 6]).top == 6


def test_regular_system():
    R = regular_system(unit_complex(F3), [1, 2, 4])
    assert R.obj(4).cohomology_table() == {0: 4}
    assert fixed_points(R.level(4), 4).action.obj.cohomology_table() == {0: 1}
    counit = triv_counit(R)
    cone = level_cone(counit)
    assert cone.obj(2).cohomology_table() == {0: 1}


def test_regular_system_of_sheaves():
    S = pseudocircle(2)
    R = regular_system(unit_sheaf(S, F2), [1, 3])
    assert R.obj(3).stalk_tables()["s0"] == {0: 3}
    assert R.stalk("s1").obj(3).cohomology_table() == {0: 3}


@pytest.mark.parametrize("levels", [[1, 2, 3, 6], [1, 5], [1]])
def test_categorical_lemma(levels):
    assert categorical_lemma_check(regular_system(concentrated(F2, 0, 1), levels)).passes
    assert categorical_lemma_check(triv(concentrated(F3, 1, 2), levels)).passes


def test_categorical_lemma_catches_a_zeroed_inflation():
    R = regular_system(unit_complex(F3), [1, 2])
    assert descends(R, 1, 2)
    broken = LevelSystem(
        R.levels,
        {n: R.level(n) for n in R.levels},
        {(1, 2): ChainMap.zero(R.obj(1), R.obj(2))},
        check=False,
    )
    check = categorical_lemma_check(broken)
    assert check.cocone and check.equivariant
    assert not check.descent
    assert not check.passes


def test_categorical_lemma_catches_a_broken_composite():
    R = regular_system(unit_complex(F2), [1, 2, 4])
    inflations = dict(R.inflations)
    inflations[(1, 4)] = ChainMap.zero(R.obj(1), R.obj(4))
    broken = LevelSystem(R.levels, {n: R.level(n) for n in R.levels}, inflations, check=False)
    check = categorical_lemma_check(broken)
    assert not check.cocone
    assert not check.passes


def test_colimit_needs_a_maximum():
    C = unit_complex(F3)
    diagram = DivisibilityDiagram([2, 3], {2: C, 3: C}, {})
    with pytest.raises(NotStabilized):
        colimit(diagram)


def test_chern_colimit():
    A = concentrated(F3, 2, 1, twist=-1)
    B = concentrated(F3, 2, 1)
    datum = ChernDatum(ChainMap(A, B, {2: F3.matrix([[1]])}))
    result = chern_colimit(datum, [1, 2, 3, 6])
    assert result.quasi_iso
    assert result.complex.cohomology_table() == B.cohomology_table() == {2: 1}
    # n c is invertible until n is divisible by ell
    assert result.level_tables[1] == result.level_tables[2] == {}
    assert result.level_tables[3] == {1: 1, 2: 1}
    with pytest.raises(NotStabilized):
        chern_colimit(datum, [1, 2])
    with pytest.raises(HypothesisFailure):
        ChernDatum(ChainMap.zero(concentrated(F3, 2, 1), B))


def test_tame_levels():
    assert tame_levels([2, 3]) == (1, 2, 3, 6)
    assert tame_levels([2, 3, 4], residue_characteristic=2) == (1, 3)
    assert tame_levels([]) == (1,)
