import pytest

from tamecycles.exceptions import HypothesisFailure, IncomparableEndpoints
from tamecycles.posets import MonotoneMap, chain_poset, pseudocircle
from tamecycles.simplicial import (
    assemble_d,
    build_dn,
    check_minimal_path,
    constant_tower,
    doubled_closed_level,
    grid_chains,
    grid_leq,
    grid_poset,
    minimal_path,
    nerve,
    pseudodisk_tower,
    staircase_paths,
)


def test_nerve_of_the_pseudocircle():
    N = nerve(pseudocircle(2), 3)
    assert N.check_identities() == []
    assert N.euler_characteristic() == 0
    assert len(N.nondegenerate(1)) == 4
    assert N.nondegenerate(2) == []


def test_nerve_degeneracies():
    N = nerve(chain_poset(1), 2)
    assert N.nondegenerate(1) == [(0, 1)]
    assert N.is_degenerate(1, (0, 0))
    assert N.s(0, (0, 1)) == (0, 0, 1)
    assert N.d(1, (0, 0, 1)) == (0, 1)
    assert N.euler_characteristic() == 1


def test_grid_order():
    assert grid_leq((0, 2), (1, 0))
    assert not grid_leq((0, 0), (0, 1))
    P = grid_poset(1)
    assert P.minimal_elements == [(0, 1)]
    assert P.maximal_elements == [(1, 0)]


@pytest.mark.parametrize(
    "start, end, count",
    [((0, 0), (0, 0), 1), ((0, 1), (2, 1), 2), ((0, 1), (1, 0), 3)],
)
def test_grid_chain_counts(start, end, count):
    chains = grid_chains(2, start, end)
    assert len(chains) == count
    assert all(chain[0] == start and chain[-1] == end for chain in chains)


def test_grid_chain_poset():
    P = grid_chains(1, (0, 1), (1, 0)).poset
    assert P.minimal_elements == [((0, 1), (1, 0))]
    assert len(P.covers) == 2
    with pytest.raises(IncomparableEndpoints):
        grid_chains(2, (1, 0), (0, 0))
    with pytest.raises(IncomparableEndpoints):
        grid_chains(1, (0, 2), (1, 0))


def test_minimal_paths():
    assert minimal_path([(1, 0), (0, 1)]) == ((0, 1), (1, 1), (1, 0))
    assert len(staircase_paths((0, 1), (1, 0))) == 2
    assert staircase_paths((1, 0), (0, 1)) == []
    for n in range(3):
        points = [(i, j) for i in range(n + 1) for j in range(n + 1)]
        for x in points:
            for y in points:
                if grid_leq(x, y):
                    assert all(check_minimal_path(chain) for chain in grid_chains(n, x, y))
    with pytest.raises(HypothesisFailure):
        minimal_path([])


def test_towers_need_level_one():
    with pytest.raises(HypothesisFailure):
        pseudodisk_tower(2, [2, 4])


def test_pseudodisk_tower_closed_pieces():
    tower = pseudodisk_tower(2, [1, 2])
    assert tower.check() == []
    assert len(tower.special[2]) == 1
    assert tower.inclusions[2].is_closed_inclusion()


def test_correspondence_diagram():
    tower = pseudodisk_tower(2, [1, 2])
    D = build_dn(tower, [2, 1], [1, 0])
    assert D.object((0, 0)) == tower.spaces[2]
    assert D.object((0, 1)) == tower.special[2]
    assert D.step((0, 1), (0, 0)) == tower.inclusions[2]
    assert D.step((0, 0), (1, 0)) == tower.transitions[(1, 2)]
    assert D.check_functoriality() == []
    assert D.check_cartesian() == []
    with pytest.raises(HypothesisFailure):
        D.step((0, 0), (1, 1))


def test_diagram_arguments_checked():
    tower = pseudodisk_tower(2, [1, 2])
    with pytest.raises(HypothesisFailure):
        build_dn(tower, [1, 2], [1, 1])
    with pytest.raises(HypothesisFailure):
        build_dn(tower, [2, 1], [0, 1])
    with pytest.raises(HypothesisFailure):
        build_dn(tower, [2], [1, 0])


def test_assembly_of_a_constant_tower():
    report = assemble_d(constant_tower(pseudocircle(2), ["s0"], [1, 2]), 2)
    assert report.holds
    assert report.failures == []
    assert report.simplices > 0


def test_assembly_of_the_pseudodisk_tower():
    report = assemble_d(pseudodisk_tower(2, [1, 2]), 2)
    assert report.holds


def test_doubled_closed_level_is_caught():
    tower = doubled_closed_level(pseudodisk_tower(2, [1, 2]), 2)
    report = assemble_d(tower, 2)
    assert not report.holds
    assert any("pullback" in failure for failure in report.failures)
    # the doubled tower still composes
    assert MonotoneMap.identity(tower.special[1]) == tower.special_transitions[(1, 1)]
