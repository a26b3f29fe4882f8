import time

import pytest

from tamecycles.exceptions import HypothesisFailure, MissingTransition
from tamecycles.linalg import PrimeField
from tamecycles.nearby import (
    GmModel,
    ModelMap,
    WrapTower,
    ayoub_nearby,
    check_tower_localization,
    compare_mi_vs_fixed,
    comparison_pullback,
    comparison_pushforward,
    comparison_shriek,
    fixed_points_identity,
    identity_model,
    kunneth_morphism,
    monodromy_invariant_vanishing,
    nth_level,
    point_model,
    stabilization_pair,
    stabilized,
    tame_nearby_cycles,
    tame_vanishing,
    wrap_model,
)
from tamecycles.posets import MonotoneMap, pseudocircle
from tamecycles.sheaves import unit_sheaf
from tamecycles.utils import divisors

F2 = PrimeField(2)
F3 = PrimeField(3)


def test_models_need_a_disk():
    S = pseudocircle(2)
    with pytest.raises(HypothesisFailure):
        GmModel(S, MonotoneMap.identity(S))


def test_model_shapes():
    model = wrap_model(2, 3)
    assert model.k == 2
    assert model.degree == 3
    assert set(model.closed) == {"0"}
    assert len(identity_model(2).open) == 4
    assert len(point_model(2).open) == 0


def test_levels_of_the_identity_model():
    # D_2 x_{D_2} D_{2n} is a copy of D_{2n}
    level = nth_level(identity_model(2), 3)
    assert len(level.space) == 13
    assert set(level.decomposition.closed) == {("0", "0")}
    assert level.deck @ level.deck @ level.deck == MonotoneMap.identity(level.space)


def test_tower_levels_are_checked():
    model = identity_model(2)
    with pytest.raises(HypothesisFailure):
        WrapTower(model, [2, 4])
    with pytest.raises(HypothesisFailure):
        WrapTower(model, [1, 2, 3])
    tower = WrapTower(model, [1, 2, 3, 6])
    assert tower.transition(2, 6).target == tower.level(2).space
    with pytest.raises(MissingTransition):
        tower.transition(2, 3)


def test_level_one_is_the_punctured_neighbourhood():
    model = identity_model(2)
    system = tame_nearby_cycles(model, unit_sheaf(model.total, F3), [1])
    assert system.obj(1).stalk_tables() == {"0": {0: 1, 1: 1}}


def test_sheaf_on_the_generic_fiber():
    model = identity_model(2)
    system = tame_nearby_cycles(model, unit_sheaf(model.open, F3), [1])
    assert system.obj(1).stalk_table("0") == {0: 1, 1: 1}
    with pytest.raises(HypothesisFailure):
        tame_nearby_cycles(model, unit_sheaf(pseudocircle(3), F3), [1])


def test_stabilization_pairs():
    assert stabilization_pair([1, 2, 3, 6], 2, 3) == (2, 6)
    assert stabilization_pair([1, 3], 1, 3) == (1, 3)
    assert stabilization_pair([1, 2], 1, 3) is None


def test_stabilized_nearby_cycles_of_the_identity():
    model = identity_model(2)
    F = unit_sheaf(model.total, F3)
    stable = stabilized(tame_nearby_cycles(model, F, [1, 3]), "0")
    # H^1 dies along the 3-fold wrap
    assert stable.pair == (1, 3)
    assert not stable.pre_stable
    assert stable.table == {0: 1}
    early = stabilized(tame_nearby_cycles(model, F, [1, 2]), "0")
    assert early.pre_stable
    assert early.table == {0: 1, 1: 1}


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("field", [F2, F3])
def test_wrap_models(n, field):
    model = wrap_model(2, n)
    F = unit_sheaf(model.total, field)
    levels = divisors(n * field.ell)
    nearby = stabilized(tame_nearby_cycles(model, F, levels), "0", model.degree)
    assert nearby.table == {0: n}
    assert nearby.order == n
    vanishing = stabilized(tame_vanishing(model, F, levels), "0", model.degree)
    assert vanishing.table == {0: n - 1}


def test_vanishing_cycles_of_the_identity():
    model = identity_model(2)
    vanishing = stabilized(tame_vanishing(model, unit_sheaf(model.total, F3), [1, 3]), "0")
    assert vanishing.table == {}


def test_empty_generic_fiber():
    model = point_model(2)
    system = tame_nearby_cycles(model, unit_sheaf(model.total, F3), [1, 2])
    assert system.obj(2).stalk_tables() == {"0": {}}


@pytest.mark.parametrize("model", [identity_model(2), wrap_model(2, 2)])
def test_fixed_points_identity(model):
    report = fixed_points_identity(model, unit_sheaf(model.total, F3), [1, 2, 4])
    assert report.holds
    assert report.level_one and report.tower
    assert report.failures == []


def test_tower_localization():
    model = wrap_model(2, 2)
    assert check_tower_localization(model, unit_sheaf(model.total, F2), [1, 2]) == []


def test_ayoub_nearby():
    model = wrap_model(2, 2)
    result = ayoub_nearby(model, unit_sheaf(model.total, F3), divisors(6))
    assert result.pair == (2, 6)
    assert result.agrees
    assert result.tables["0"] == {0: 2}


def test_pullback_comparisons():
    model = identity_model(2)
    f = ModelMap(model, model, MonotoneMap.identity(model.total))
    F = unit_sheaf(model.total, F3)
    assert comparison_pullback(f, F, [1, 2])[1:] == (True, True)
    assert comparison_pushforward(f, F, [1, 2]).equivalence
    wrap = wrap_model(2, 2)
    down = ModelMap(wrap, model, wrap.p)
    assert not down.is_smooth
    assert not comparison_pullback(down, F, [1, 2]).expected


def test_model_maps_commute_with_the_structure_maps():
    model = identity_model(2)
    D = model.total
    rotation = MonotoneMap(D, D, {x: x if x == "0" else f"s{(int(x[1:]) + 2) % 4}" for x in D})
    with pytest.raises(HypothesisFailure):
        ModelMap(model, model, rotation)
    with pytest.raises(HypothesisFailure):
        ModelMap(identity_model(3), model, MonotoneMap.identity(model.total))


def test_shriek_comparison():
    model = identity_model(2)
    f = ModelMap(model, model, MonotoneMap.identity(model.total))
    F = unit_sheaf(model.total, F3)
    result = comparison_shriek(f, F, [1, 2], G=F)
    assert all(result.gamma(n).is_quasi_iso() for n in (1, 2))
    assert result.exchange is not None
    wrap = wrap_model(2, 2)
    with pytest.raises(HypothesisFailure):
        comparison_shriek(ModelMap(wrap, model, wrap.p), unit_sheaf(wrap.total, F3), [1, 2])


def test_kunneth_on_identity_factors():
    model = identity_model(2)
    F = unit_sheaf(model.total, F3)
    report = kunneth_morphism(model, F, model, F, [1, 3])
    assert report.stabilized
    assert set(report.levelwise) == {1, 3}


def test_kunneth_on_wrapped_factors_stays_small():
    model = wrap_model(2, 2)
    F = unit_sheaf(model.total, F3)
    start = time.perf_counter()
    report = kunneth_morphism(model, F, model, F, divisors(6))
    assert time.perf_counter() - start < 60
    assert set(report.levelwise) == {1, 2, 3, 6}
    for n in report.levelwise:
        # the factors enter through their stalkwise cohomology
        source = report.map(n).source
        assert all(sum(source[z].dims) == sum(source.stalk_table(z).values()) for z in source.base)


def test_monodromy_invariant_vanishing():
    result = monodromy_invariant_vanishing(identity_model(2), F3)
    assert result.sheaf.stalk_tables() == {"0": {}}
    assert result.datum.source.cohomology_table() == {2: 1}


def test_invariants_against_monodromy_invariant_cycles():
    tame = compare_mi_vs_fixed(wrap_model(2, 2), F3, divisors(6))
    assert tame.tame
    assert tame.verdict == "PASS"
    assert tame.invariants == tame.monodromy_invariant
    wild = compare_mi_vs_fixed(wrap_model(2, 3), F3, divisors(9))
    assert not wild.tame
    assert wild.verdict == "RECORDED"


def test_wild_monodromy_trivial_on_vanishing_cycles():
    # over F2 the swap of two sheets acts trivially on Λ²/Λ, but the group is still Z/2
    result = compare_mi_vs_fixed(wrap_model(2, 2), F2, [1, 2, 4])
    assert not result.tame
    assert result.verdict == "RECORDED"
    odd = compare_mi_vs_fixed(wrap_model(2, 3), F2, divisors(6))
    assert odd.tame
    assert odd.verdict == "PASS"
