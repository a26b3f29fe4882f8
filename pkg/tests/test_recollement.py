import numpy as np
import pytest

from tamecycles.complexes import ChainMap, concentrated
from tamecycles.equivariant import LevelMap, regular_system, triv
from tamecycles.exceptions import HypothesisFailure, MissingAdjoint, NaturalityFailure
from tamecycles.linalg import PrimeField
from tamecycles.posets import (
    FinitePoset,
    MonotoneMap,
    OpenClosedDecomposition,
    product_poset,
    pseudocircle,
    pseudodisk,
    random_poset,
)
from tamecycles.recollement import (
    EquivariantRecollement,
    EquivariantTriple,
    GluedFunctorData,
    SheafRecollement,
)
from tamecycles.sheaves import SheafMap, random_sheaf, skyscraper, unit_sheaf

F3 = PrimeField(3)


def disk_recollement(k: int = 2) -> SheafRecollement:
    return SheafRecollement(OpenClosedDecomposition(pseudodisk(k), ["0"]))


def test_docstring_example():
    r = disk_recollement()
    F = unit_sheaf(r.ambient, F3)
    assert r.certify(F).is_quasi_iso()


def test_decompose_the_constant_sheaf():
    r = disk_recollement()
    A, B, theta = r.decompose(unit_sheaf(r.ambient, F3))
    assert A.stalk_tables() == {"0": {0: 1}}
    assert set(B.base) == {"s0", "s1", "s2", "s3"}
    # L0 i1 of the punctured disk is the cohomology of the circle
    assert theta.target["0"].cohomology_table() == {0: 1, 1: 1}
    assert theta("0").induced_rank(0) == 1


def test_reconstruct_recovers_the_stalks():
    r = disk_recollement(3)
    F = unit_sheaf(r.ambient, F3)
    P = r.reconstruct(r.decompose(F))
    assert P.stalk_tables() == F.stalk_tables()


@pytest.mark.parametrize("seed", range(6))
def test_round_trip_on_random_sheaves(seed):
    rng = np.random.default_rng(seed)
    P = random_poset(rng, 5)
    closed = P.down_closure(P.minimal_elements[:1])
    F = random_sheaf(F3, P, rng)
    r = SheafRecollement(OpenClosedDecomposition(P, closed))
    assert r.round_trip(F, r.decompose(F)) == (True, True)


def test_triples_of_extensions():
    r = disk_recollement()
    A = unit_sheaf(r.closed, F3)
    triple = r.triple_from_closed(A)
    assert r.reconstruct(triple).stalk_tables() == r.closed_pushforward(A).stalk_tables()
    B = unit_sheaf(r.open, F3)
    triple = r.triple_from_open(B)
    assert r.reconstruct(triple).stalk_table("0") == {}
    assert r.certify(r.shriek_extension(B)).is_quasi_iso()


def test_conservativity():
    r = disk_recollement()
    F = unit_sheaf(r.ambient, F3)
    assert r.check_conservativity(SheafMap.identity(F)) == (True, True)
    sky = skyscraper(r.ambient, "0", concentrated(F3, 0, 1))
    zero = SheafMap.zero(sky, sky)
    assert r.check_conservativity(zero) == (False, False)
    with pytest.raises(MissingAdjoint):
        r.left_adjoint(unit_sheaf(r.closed, F3))


def test_mapping_decomposition():
    r = disk_recollement()
    F = unit_sheaf(r.ambient, F3)
    result = r.mapping_decomposition(F, F)
    assert result.holds
    assert result.hom_table == {0: 1}


def test_glued_functor_of_the_identity():
    r = disk_recollement()
    data = GluedFunctorData(
        r.closed_part,
        r.open_part,
        r.canonical_theta,
        r.closed_part_map,
        r.open_part_map,
    )
    glued = r.glue_functor(data)
    F = unit_sheaf(r.ambient, F3)
    assert glued(F).stalk_tables() == F.stalk_tables()
    assert glued.map(SheafMap.identity(F), F, F).is_quasi_iso()
    with pytest.raises(HypothesisFailure):
        r.glue_functor(GluedFunctorData(r.closed_part, r.open_part, r.canonical_theta)).map(
            SheafMap.identity(F), F, F
        )


def sheeted(X: FinitePoset, sheets: int) -> MonotoneMap:
    return product_poset(X, FinitePoset(["a", "b"][:sheets], (), "sheets")).left


@pytest.mark.parametrize("sheets", [1, 2])
def test_glued_adjunction(sheets):
    X = pseudocircle(2)
    closed = ["s0", "s2"]
    f = sheeted(X, sheets)
    target = SheafRecollement(OpenClosedDecomposition(X, closed))
    source = SheafRecollement(OpenClosedDecomposition(f.source, f.preimage(closed)))
    rng = np.random.default_rng(sheets)
    xs = [unit_sheaf(X, F3), random_sheaf(F3, X, rng)]
    ys = [random_sheaf(F3, f.source, rng)]
    assert target.check_glued_adjunction(source, f, xs, ys).holds


def test_glued_adjunction_needs_compatible_decompositions():
    X = pseudodisk(2)
    f = sheeted(X, 2)
    target = SheafRecollement(OpenClosedDecomposition(X, ["0"]))
    source = SheafRecollement(OpenClosedDecomposition(f.source, [("0", "a")]))
    with pytest.raises(HypothesisFailure):
        target.glue_adjunction(source, f)


def test_equivariant_recollement():
    S = pseudocircle(2)
    A = unit_sheaf(S, F3)
    levels = [1, 2]
    rec = EquivariantRecollement(S, levels)
    regular = regular_system(A, levels)
    first = regular.obj(1)
    theta = SheafMap(A, first, {x: ChainMap.identity(A[x]).with_endpoints(A[x], first[x]) for x in S}, check=False)
    triple = rec.reconstruct(rec.decompose(EquivariantTriple(A, regular, theta)))
    # triv(A) -> regular is the diagonal; its cofiber at level 2 is one copy of A
    assert rec.cofiber(triple).obj(2).stalk_tables()["s0"] == {0: 1}
    assert rec.fiber(triple).obj(1).stalk_tables()["s0"] == {}
    assert rec.left_adjoint(A).levels == (1, 2)
    with pytest.raises(HypothesisFailure):
        EquivariantRecollement(S, [1, 3]).reconstruct(rec.decompose(triple))


def test_equivariant_morphisms_commute_with_theta():
    S = pseudocircle(2)
    A = unit_sheaf(S, F3)
    rec = EquivariantRecollement(S, [1])
    trivial = triv(A, [1])
    t = EquivariantTriple(A, trivial, SheafMap.identity(A))
    identity = {1: SheafMap.identity(A)}
    assert rec.is_iso(rec.morphism(t, t, SheafMap.identity(A), LevelMap(trivial, trivial, identity)))
    with pytest.raises(NaturalityFailure):
        rec.morphism(t, t, SheafMap.zero(A, A), LevelMap(trivial, trivial, identity))


def test_equivariant_adjunction():
    X = pseudocircle(2)
    f = sheeted(X, 2)
    levels = (1, 2)
    A = unit_sheaf(X, F3)
    B = unit_sheaf(f.source, F3)
    regular = regular_system(B, levels)
    first = regular.obj(1)
    theta = SheafMap(
        B, first, {y: ChainMap.identity(B[y]).with_endpoints(B[y], first[y]) for y in f.source}, check=False
    )
    x = EquivariantTriple(A, triv(A, levels), SheafMap.identity(A))
    y = EquivariantTriple(B, regular, theta)
    check = EquivariantRecollement(X, levels).check_glued_adjunction(
        EquivariantRecollement(f.source, levels), f, [x], [y]
    )
    assert check == (True, True, True)
