import numpy as np
import pytest

from tamecycles.complexes import concentrated
from tamecycles.derived import (
    check_base_change,
    check_localization,
    check_purity,
    check_triangle_identities,
    derived_hom,
    derived_pushforward,
    derived_sections,
    exceptional_pullback,
    global_sections,
    hom_dimension,
    injective_resolution,
)
from tamecycles.exceptions import HypothesisFailure
from tamecycles.derived import Cochains
from tamecycles.linalg import PrimeField
from tamecycles.posets import (
    MonotoneMap,
    OpenClosedDecomposition,
    chain_poset,
    covering_map,
    pseudocircle,
    pseudodisk,
    random_poset,
    theta_map,
)
from tamecycles.sheaves import SheafMap, constant_sheaf, point_injective, random_sheaf, skyscraper, unit_sheaf

F2 = PrimeField(2)
F3 = PrimeField(3)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_pseudocircle_cohomology(k):
    assert global_sections(unit_sheaf(pseudocircle(k), F3)).cohomology_table() == {0: 1, 1: 1}


def test_contractible_spaces():
    assert global_sections(unit_sheaf(pseudodisk(3), F2)).cohomology_table() == {0: 1}
    assert global_sections(unit_sheaf(chain_poset(3), F2)).cohomology_table() == {0: 1}


def test_skyscraper_at_a_minimal_point_is_injective():
    S = pseudocircle(2)
    V = concentrated(F3, 0, 1)
    closed = skyscraper(S, "s0", V)
    assert closed.stalk_tables() == point_injective(S, "s0", V).stalk_tables()
    assert global_sections(closed).cohomology_table() == {0: 1}
    assert injective_resolution(closed).sheaf.stalk_tables() == closed.stalk_tables()


def test_skyscraper_at_a_maximal_point():
    # {s1} is open, so this is an extension by zero and its sections sit in degree 1
    S = pseudocircle(2)
    assert global_sections(skyscraper(S, "s1", concentrated(F3, 0, 1))).cohomology_table() == {1: 1}


def test_sections_over_an_open():
    D = pseudodisk(2)
    F = unit_sheaf(D, F3)
    assert derived_sections(F, ["s0", "s1", "s2", "s3"]).complex.cohomology_table() == {0: 1, 1: 1}
    assert derived_sections(F, ["s1"]).complex.cohomology_table() == {0: 1}


def test_chain_sets_must_be_face_closed():
    F = unit_sheaf(chain_poset(1), F3)
    with pytest.raises(HypothesisFailure):
        Cochains(F, [(0, 1)])


def test_pushforward_along_a_cover():
    cover = covering_map(2, 3)
    pushed = derived_pushforward(cover, unit_sheaf(cover.source, F2))
    for x in pushed.base:
        assert pushed.stalk_table(x) == {0: 3}
    assert global_sections(pushed).cohomology_table() == {0: 1, 1: 1}


def test_pushforward_along_the_punctured_disk():
    D = pseudodisk(2)
    decomposition = OpenClosedDecomposition(D, ["0"])
    pushed = derived_pushforward(decomposition.j, unit_sheaf(decomposition.open, F3))
    assert pushed.stalk_table("0") == {0: 1, 1: 1}
    assert pushed.stalk_table("s1") == {0: 1}


@pytest.mark.parametrize("seed", range(4))
def test_injective_resolution(seed):
    P = random_poset(np.random.default_rng(seed), 4)
    F = random_sheaf(F3, P, np.random.default_rng(seed + 100))
    resolution = injective_resolution(F)
    assert resolution.augmentation.is_quasi_iso()
    assert global_sections(resolution.sheaf).cohomology_table() == global_sections(F).cohomology_table()


@pytest.mark.parametrize("closed", [["0"], ["0", "s0"], ["0", "s0", "s2"]])
def test_localization_on_the_disk(closed):
    D = pseudodisk(2)
    check = check_localization(OpenClosedDecomposition(D, closed), unit_sheaf(D, F3))
    assert check.open_closed
    assert check.closed_open
    assert check.failures == []


@pytest.mark.parametrize("seed", range(4))
def test_localization_on_random_sheaves(seed):
    rng = np.random.default_rng(seed)
    P = random_poset(rng, 5)
    F = random_sheaf(F2, P, rng)
    closed = P.down_closure(P.minimal_elements[:1])
    assert check_localization(OpenClosedDecomposition(P, closed), F).failures == []


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("ell", [2, 3, 5])
def test_purity(k, ell):
    # i^! of the constant sheaf at the origin is a shifted, twisted line
    assert check_purity(k, PrimeField(ell)) == ({2: 1}, -1)


def test_exceptional_pullback_of_a_skyscraper():
    D = pseudodisk(2)
    decomposition = OpenClosedDecomposition(D, ["0"])
    result = exceptional_pullback(decomposition, skyscraper(D, "0", concentrated(F3, 0, 1)))
    assert result.sheaf.stalk_table("0") == {0: 1}


def test_exceptional_pullback_of_the_constant_sheaf():
    D = pseudodisk(2)
    decomposition = OpenClosedDecomposition(D, ["0", "s0"])
    result = exceptional_pullback(decomposition, unit_sheaf(D, F3))
    assert set(result.sheaf.base) == {"0", "s0"}
    # the punctured neighbourhood of s0 is two points, that of the origin is contractible
    assert result.sheaf.stalk_table("s0") == {1: 1}
    assert result.sheaf.stalk_table("0") == {}
    assert result.unit.source.stalk_table("s0") == {0: 1}


def test_base_change_along_an_open():
    f = theta_map(2, 2)
    decomposition = OpenClosedDecomposition(f.target, ["0"])
    result = check_base_change(f, decomposition.j, unit_sheaf(f.source, F3))
    assert result.holds
    assert result.failing == []
    assert result.source_tables == result.target_tables


def test_base_change_along_a_closed_point():
    f = theta_map(2, 3)
    decomposition = OpenClosedDecomposition(f.target, ["0"])
    assert check_base_change(f, decomposition.i, unit_sheaf(f.source, F2)).holds


def test_derived_hom_of_constant_sheaves():
    S = pseudocircle(2)
    L = unit_sheaf(S, F3)
    assert hom_dimension(L, L) == 1
    assert hom_dimension(L, L, 1) == 1
    assert hom_dimension(L, L, 2) == 0
    hom = derived_hom(L, L)
    assert not F3.is_zero(hom.complex.class_of(0, hom.vector(SheafMap.identity(L))))


def test_triangle_identities():
    cover = covering_map(2, 2)
    G = unit_sheaf(cover.target, F3)
    K = constant_sheaf(cover.source, concentrated(F3, 0, 2))
    assert check_triangle_identities(cover, G, K) == (True, True)
    f = MonotoneMap.identity(pseudodisk(2))
    assert check_triangle_identities(f, unit_sheaf(f.target, F3), unit_sheaf(f.source, F3)) == (True, True)
