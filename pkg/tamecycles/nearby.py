"""
Tame nearby and vanishing cycles on wrap models.

A model is a finite space X with a map ``p: X -> D_k`` to a pseudodisk,
covering-like over the circle. Level n of its tower is the fiber product
``X^(n) = X x_{D_k} D_{kn}`` along the n-fold wrap, with the deck rotation
acting on the second factor. The tame nearby cycles of F are the system
``n -> i* Rj_* F^(n)`` on the special fiber ``X_0 = p^{-1}(0)``.
"""
import logging
import math
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .complexes import (
    ChainMap,
    CochainComplex,
    homotopy_between,
    minimal_map,
    minimal_model,
    quasi_inverse,
    tensor_maps,
    triangle_map,
)
from .derived import (
    Cochains,
    block_inclusion,
    chain_pullback,
    check_localization,
    cochains_map,
    cup_product,
    derived_pushforward,
    derived_pushforward_cochains,
    derived_pushforward_map,
    descent_map,
    exceptional_pullback,
    fiber_homotopy,
    sheaf_tensor,
    unit,
)
from .equivariant import (
    ChernDatum,
    CyclicAction,
    LevelMap,
    LevelSystem,
    fixed_points,
    homotopy_fixed_points,
    inflate,
    matrix_order,
    triv,
)
from .exceptions import HypothesisFailure, MissingTransition
from .linalg import Matrix, PrimeField
from .posets import (
    ORIGIN,
    FinitePoset,
    MonotoneMap,
    OpenClosedDecomposition,
    disk_rotation,
    disk_transition,
    poset_pullback,
    pseudocircle,
    pseudodisk,
    theta_map,
)
from .recollement import EquivariantRecollement, EquivariantTriple, level_pullback, level_pushforward
from .sheaves import (
    SheafComplex,
    SheafMap,
    closed_pushforward,
    closed_pushforward_map,
    constant_sheaf,
    pullback_sheaf,
    restrict,
    sheaf_cone,
    shriek_extension,
    shriek_extension_map,
    unit_sheaf,
)
from .typing import CohomologyTable, Element, Verdict
from .utils import is_lcm_closed, lcm

logger = logging.getLogger(__name__)

__all__ = [
    "GmModel",
    "ModelMap",
    "WrapTower",
    "identity_model",
    "wrap_model",
    "point_model",
    "nth_level",
    "tame_nearby_cycles",
    "total_nearby",
    "tame_vanishing",
    "stabilized",
    "fixed_points_identity",
    "comparison_pullback",
    "comparison_pushforward",
    "comparison_shriek",
    "ayoub_nearby",
    "kunneth_morphism",
    "monodromy_invariant_vanishing",
    "compare_mi_vs_fixed",
    "check_tower_localization",
    "stabilization_pair",
    "stabilized_complex",
    "fiber_product_model",
    "default_datum",
    "Level",
    "NearbyCycles",
    "Stabilized",
    "FixedPointsReport",
    "Comparison",
    "ShriekComparison",
    "AyoubNearby",
    "ProductModel",
    "KunnethReport",
    "MonodromyInvariant",
    "MiComparison",
    "VanishingTriple",
]

VanishingTriple = EquivariantTriple


def _disk_degree(disk: FinitePoset) -> int:
    return (len(disk) - 1) // 2


def _restricted(f: MonotoneMap, source: FinitePoset, target: FinitePoset) -> MonotoneMap:
    return MonotoneMap(source, target, {x: f(x) for x in source}, check=False)


class GmModel:
    """
    ``p: X -> D_k``. The special fiber ``X_0 = p^{-1}(0)`` is closed and its
    complement ``U_X`` lies over the pseudocircle.
    """

    def __init__(self, total: FinitePoset, p: MonotoneMap, name: str = "", check: bool = True) -> None:
        if ORIGIN not in p.target:
            raise HypothesisFailure("A model maps to a pseudodisk", p.target.name)
        self.total = total
        self.p = p
        self.name = name or total.name
        self.k = _disk_degree(p.target)
        self.decomposition = OpenClosedDecomposition(total, p.preimage([ORIGIN]), codimension=1)
        if check and len(self.open):
            circle = pseudocircle(self.k)
            if not _restricted(p, self.open, circle).is_covering_like():
                raise HypothesisFailure("Model is not covering-like over the circle", self.name)

    def __repr__(self) -> str:
        return f"<GmModel {self.name} over D_{self.k}>"

    @property
    def closed(self) -> FinitePoset:
        return self.decomposition.closed

    @property
    def open(self) -> FinitePoset:
        return self.decomposition.open

    @property
    def degree(self) -> int:
        """
        Number of sheets over the circle.
        """
        return len(self.p.preimage(["s0"]))


def identity_model(k: int) -> GmModel:
    disk = pseudodisk(k)
    return GmModel(disk, MonotoneMap.identity(disk), f"id(D_{k})")


def wrap_model(k: int, n: int) -> GmModel:
    """
    The degree-n wrap ``D_{kn} -> D_k``.
    """
    theta = theta_map(k, n)
    return GmModel(theta.source, theta, f"wrap({k},{n})")


def point_model(k: int) -> GmModel:
    """
    The origin alone: an empty generic fiber.
    """
    disk = pseudodisk(k)
    origin = FinitePoset([ORIGIN], name="origin")
    return GmModel(origin, MonotoneMap(origin, disk, {ORIGIN: ORIGIN}), "origin")


class Level(NamedTuple):
    n: int
    space: FinitePoset
    projection: MonotoneMap
    structure: MonotoneMap
    deck: MonotoneMap
    decomposition: OpenClosedDecomposition
    # X_0 -> X^(n), x -> (x, origin)
    origin: MonotoneMap
    # U^(n) -> U_X
    open_projection: MonotoneMap
    open_deck: MonotoneMap


def nth_level(model: GmModel, n: int) -> Level:
    square = poset_pullback(model.p, theta_map(model.k, n))
    space = square.poset
    rotation = disk_rotation(model.k, n)
    deck = MonotoneMap(space, space, {(x, y): (x, rotation(y)) for x, y in space}, f"deck({n})")
    decomposition = OpenClosedDecomposition(space, [e for e in space if e[1] == ORIGIN], codimension=1)
    origin = MonotoneMap(model.closed, space, {x: (x, ORIGIN) for x in model.closed}, check=False)
    U = decomposition.open
    return Level(
        n,
        space,
        square.left,
        square.right,
        deck,
        decomposition,
        origin,
        _restricted(square.left, U, model.open),
        _restricted(deck, U, U),
    )


class WrapTower:
    def __init__(self, model: GmModel, levels: Iterable[int]) -> None:
        self.model = model
        self.levels: Tuple[int, ...] = tuple(sorted(set(levels)))
        if 1 not in self.levels:
            raise HypothesisFailure("levels must contain 1", list(self.levels))
        if not is_lcm_closed(self.levels):
            raise HypothesisFailure("levels must be closed under lcm", list(self.levels))
        self._levels: Dict[int, Level] = {}

    def __repr__(self) -> str:
        return f"<WrapTower {self.model!r} levels={list(self.levels)}>"

    def level(self, n: int) -> Level:
        if n not in self._levels:
            self._levels[n] = nth_level(self.model, n)
        return self._levels[n]

    def transition(self, n: int, m: int) -> MonotoneMap:
        """
        ``X^(m) -> X^(n)`` for ``n | m``.
        """
        if m % n:
            raise MissingTransition(f"{n} does not divide {m}", (n, m))
        u = disk_transition(self.model.k, n, m // n)
        source, target = self.level(m).space, self.level(n).space
        return MonotoneMap(source, target, {(x, y): (x, u(y)) for x, y in source}, f"u({n},{m})", check=False)

    def open_transition(self, n: int, m: int) -> MonotoneMap:
        return _restricted(
            self.transition(n, m),
            self.level(m).decomposition.open,
            self.level(n).decomposition.open,
        )


# ################################################################
# nearby cycles
# ################################################################


class NearbyCycles:
    """
    The level system of tame nearby cycles together with the chain models
    it is computed from: `parts[n][x]` is ``RΓ(U_{(x,0)} ∩ U^(n), F^(n))``.
    """

    def __init__(self, tower: WrapTower, F: SheafComplex, check: bool = True) -> None:
        model = tower.model
        if F.base == model.total:
            F = restrict(F, model.open) if len(model.open) else F
        elif F.base != model.open:
            raise HypothesisFailure("Sheaf is not supported on the generic fiber", F.base.name)
        self.tower = tower
        self.F = F
        self.field: PrimeField = F.field
        self.pulled: Dict[int, SheafComplex] = {}
        self.parts: Dict[int, Dict[Element, Cochains]] = {}
        X0 = model.closed
        if not len(model.open):
            zero = SheafComplex.zero(X0, self.field, F.twist)
            self.system = triv(zero, tower.levels)
            return
        stalks: Dict[int, SheafComplex] = {}
        actions = {}
        for n in tower.levels:
            level = tower.level(n)
            pulled = pullback_sheaf(level.open_projection, F)
            self.pulled[n] = pulled
            parts = derived_pushforward_cochains(level.decomposition.j, pulled)
            self.parts[n] = {x: parts[(x, ORIGIN)] for x in X0}
            sheaf = pullback_sheaf(level.origin, derived_pushforward(level.decomposition.j, pulled))
            stalks[n] = sheaf
            g = {
                x: chain_pullback(level.open_deck, self.parts[n][x], self.parts[n][x]).with_endpoints(
                    sheaf[x], sheaf[x]
                )
                for x in X0
            }
            actions[n] = CyclicAction(n, SheafMap(sheaf, sheaf, g, check=check), check=check)
        inflations = {}
        for n in tower.levels:
            for m in tower.levels:
                if m != n and m % n == 0:
                    u = tower.open_transition(n, m)
                    inflations[(n, m)] = SheafMap(
                        stalks[n],
                        stalks[m],
                        {
                            x: chain_pullback(u, self.parts[n][x], self.parts[m][x]).with_endpoints(
                                stalks[n][x], stalks[m][x]
                            )
                            for x in X0
                        },
                        check=check,
                    )
        self.system = LevelSystem(tower.levels, actions, inflations, check=check)
        logger.debug("nearby cycles of %r on levels %s", model, list(tower.levels))

    def __repr__(self) -> str:
        return f"<NearbyCycles {self.tower!r}>"


def tame_nearby_cycles(model: GmModel, F: SheafComplex, levels: Iterable[int]) -> LevelSystem:
    """
    Level n is ``i* Rj_*`` of the pullback of F to ``U^(n)``, with the
    deck action and the inflations along the tower maps. F may be given on
    X or on its generic fiber.
    """
    return NearbyCycles(WrapTower(model, levels), F).system


def _level_one_theta(model: GmModel, F: SheafComplex, nearby: NearbyCycles) -> SheafMap:
    """
    ``i* F -> Ψ_1`` adjoint to the unit of ``(j*, Rj_*)``: the unit into
    ``RΓ(U_x ∩ U_X, F)`` followed by the chain pullback onto level 1.
    """
    A = restrict(F, model.closed)
    target = nearby.system.obj(1)
    if not len(model.open):
        return SheafMap.zero(A, target)
    u = unit(model.decomposition.j, F)
    direct = derived_pushforward_cochains(model.decomposition.j, restrict(F, model.open))
    level = nearby.tower.level(1)
    components = {
        x: (chain_pullback(level.open_projection, direct[x], nearby.parts[1][x]) @ u(x)).with_endpoints(A[x], target[x])
        for x in model.closed
    }
    return SheafMap(A, target, components)


def total_nearby(model: GmModel, F: SheafComplex, levels: Iterable[int]) -> VanishingTriple:
    """
    ``(i* F, Ψ(j* F), theta)``, the object of the glued category.
    """
    nearby = NearbyCycles(WrapTower(model, levels), F)
    return EquivariantTriple(restrict(F, model.closed), nearby.system, _level_one_theta(model, F, nearby))


def tame_vanishing(model: GmModel, F: SheafComplex, levels: Iterable[int]) -> LevelSystem:
    """
    The cofiber of the specialization ``triv(i* F) -> Ψ(j* F)``.
    """
    triple = total_nearby(model, F, levels)
    return EquivariantRecollement(model.closed, triple.open.levels).cofiber(triple)


# ################################################################
# stabilization
# ################################################################


class Stabilized(NamedTuple):
    # (N1, N): the value is the image of level N1 in level N
    pair: Tuple[int, int]
    pre_stable: bool
    table: CohomologyTable
    # monodromy on the image, in the basis `bases[k]`
    monodromy: Dict[int, Matrix]
    bases: Dict[int, Matrix]
    order: int


def stabilization_pair(levels: Sequence[int], degree: int, ell: int) -> Optional[Tuple[int, int]]:
    """
    The smallest ``N1 | N`` among `levels` with ``degree | N1`` and
    ``ell | N / N1``, if any.
    """
    for first in sorted(levels):
        if first % degree:
            continue
        for second in sorted(levels):
            if second % first == 0 and (second // first) % ell == 0:
                return first, second
    return None


def stabilized(system: LevelSystem, x: Element, degree: int = 1) -> Stabilized:
    """
    Stabilized cohomology of a system of sheaves at x: the image of
    ``H(level N1) -> H(level N)`` with the monodromy it carries. Without
    a stabilizing pair the top level is used as is.
    """
    field = system.field
    stalk = system.stalk(x)
    pair = stabilization_pair(stalk.levels, degree, field.ell)
    pre_stable = pair is None
    if pair is None:
        pair = (stalk.top, stalk.top)
    first, second = pair
    if pre_stable:
        logger.info("levels %s do not stabilize degree %d; using level %d", list(stalk.levels), degree, second)
    inflation = stalk.inflation(first, second)
    g = stalk.level(second).g
    table: CohomologyTable = {}
    monodromy: Dict[int, Matrix] = {}
    bases: Dict[int, Matrix] = {}
    order = 1
    for k in inflation.target.degrees():
        basis = field.image(inflation.induced(k))
        if not basis.shape[1]:
            continue
        coords = field.solve(basis, field.mul(g.induced(k), basis))
        assert coords is not None, "the image of an equivariant map is invariant"
        table[k] = basis.shape[1]
        monodromy[k] = coords
        bases[k] = basis
        order = lcm(order, matrix_order(field, coords, second) or second)
    return Stabilized(pair, pre_stable, table, monodromy, bases, order)


def stabilized_complex(stable: Stabilized, field: PrimeField) -> CyclicAction:
    """
    The stabilized cohomology as a complex with zero differentials and its
    monodromy, an action of the monodromy's order.
    """
    if not stable.table:
        return CyclicAction.trivial(1, CochainComplex(field, 0, [0]))
    lo, hi = min(stable.table), max(stable.table)
    complex = CochainComplex(field, lo, [stable.table.get(k, 0) for k in range(lo, hi + 1)])
    g = ChainMap(complex, complex, stable.monodromy)
    return CyclicAction(stable.order, g)


# ################################################################
# fixed points
# ################################################################


class FixedPointsReport(NamedTuple):
    holds: bool
    level_one: bool
    tower: bool
    failures: List[str]


def fixed_points_identity(model: GmModel, F: SheafComplex, levels: Iterable[int]) -> FixedPointsReport:
    """
    Level 1 of the nearby cycles is ``i* Rj_* j* F``, and for ``n | m``
    with ``m / n`` prime to ℓ the inflation identifies level n with the
    fixed points of the subgroup of order ``m / n`` at level m.
    """
    nearby = NearbyCycles(WrapTower(model, levels), F)
    failures = []
    if len(model.open):
        direct = derived_pushforward_cochains(model.decomposition.j, nearby.F)
        projection = nearby.tower.level(1).open_projection
        for x in model.closed:
            if not chain_pullback(projection, direct[x], nearby.parts[1][x]).is_quasi_iso():
                failures.append(f"level 1 at {x!r}")
    level_one = not failures
    system = nearby.system
    ell = system.field.ell
    for n in system.levels:
        for m in system.levels:
            if m == n or m % n or math.gcd(m // n, ell) != 1:
                continue
            for x in model.closed:
                fixed = fixed_points(system.level(m).stalk(x), m // n)
                if not (fixed.projection @ system.inflation(n, m)(x)).is_quasi_iso():
                    failures.append(f"levels {n} -> {m} at {x!r}")
    tower = not any(f.startswith("levels") for f in failures)
    return FixedPointsReport(not failures, level_one, tower, failures)


# ################################################################
# functoriality
# ################################################################


class ModelMap:
    """
    ``f: Y -> X`` over the common pseudodisk, ``p_X f = p_Y``. It maps the
    special fiber to the special fiber and the generic fiber to the
    generic fiber, and lifts to every level by ``(y, d) -> (f y, d)``.
    """

    def __init__(self, source: GmModel, target: GmModel, f: MonotoneMap, check: bool = True) -> None:
        if f.source != source.total or f.target != target.total:
            raise HypothesisFailure("Map does not go between the model spaces", f)
        if source.k != target.k:
            raise HypothesisFailure("Models over different pseudodisks", (source.k, target.k))
        if check and any(target.p(f(y)) != source.p(y) for y in source.total):
            raise HypothesisFailure("Map does not commute with the structure maps", f)
        self.source = source
        self.target = target
        self.f = f
        self.closed_part = _restricted(f, source.closed, target.closed)
        self.open_part = _restricted(f, source.open, target.open)

    def __repr__(self) -> str:
        return f"<ModelMap {self.source.name} -> {self.target.name}>"

    def __call__(self, y: Element) -> Element:
        return self.f(y)

    @property
    def is_smooth(self) -> bool:
        return self.f.is_covering_like()

    @property
    def is_proper(self) -> bool:
        return self.f.is_closed_inclusion()

    def level(self, n: int, source: WrapTower, target: WrapTower) -> MonotoneMap:
        Y, X = source.level(n).space, target.level(n).space
        return MonotoneMap(Y, X, {(y, d): (self.f(y), d) for y, d in Y}, check=False)

    def open_level(self, n: int, source: WrapTower, target: WrapTower) -> MonotoneMap:
        return _restricted(
            self.level(n, source, target),
            source.level(n).decomposition.open,
            target.level(n).decomposition.open,
        )


class Comparison(NamedTuple):
    map: LevelMap
    # every component is a quasi-isomorphism
    equivalence: bool
    # the map satisfies the hypothesis under which equivalence is expected
    expected: bool


def _is_equivalence(phi: LevelMap) -> bool:
    return all(phi(n).is_quasi_iso() for n in phi.source.levels)


def comparison_pullback(f: ModelMap, F: SheafComplex, levels: Iterable[int]) -> Comparison:
    """
    ``f0* Ψ(F) -> Ψ(f* F)``: at level n the chain pullback along the lifted
    map of generic fibers. An equivalence when f is covering-like.
    """
    return _pullback_comparison(f, F, levels)[0]


def _pullback_comparison(
    f: ModelMap, F: SheafComplex, levels: Iterable[int]
) -> Tuple[Comparison, NearbyCycles]:
    X, Y = f.target, f.source
    below = NearbyCycles(WrapTower(X, levels), F)
    lift = f.f if F.base == X.total else f.open_part
    above = NearbyCycles(WrapTower(Y, levels), pullback_sheaf(lift, F))
    source = level_pullback(f.closed_part, below.system)
    target = above.system
    components = {}
    for n in source.levels:
        S, T = source.obj(n), target.obj(n)
        if not len(Y.open):
            components[n] = SheafMap.zero(S, T)
            continue
        u = f.open_level(n, above.tower, below.tower)
        components[n] = SheafMap(
            S,
            T,
            {
                y: chain_pullback(u, below.parts[n][f(y)], above.parts[n][y]).with_endpoints(S[y], T[y])
                for y in Y.closed
            },
            check=False,
        )
    phi = LevelMap(source, target, components, check=False)
    return Comparison(phi, _is_equivalence(phi), f.is_smooth), above


def comparison_pushforward(f: ModelMap, F: SheafComplex, levels: Iterable[int]) -> Comparison:
    """
    ``Ψ(Rf_* F) -> Rf0_* Ψ(F)``. At level n and ``x in X_0`` it is the
    base change map into ``Rf^(n)_*`` of the pulled back sheaf, followed by
    descent through ``RΓ(f^(n)^{-1} V_x)`` for ``V_x = U_{(x,0)} ∩ U^(n)``.
    An equivalence when f is a closed inclusion.
    """
    X, Y = f.target, f.source
    if not len(Y.open):
        raise HypothesisFailure("Pushforward from a model with empty generic fiber", Y.name)
    above = NearbyCycles(WrapTower(Y, levels), F)
    pushed = derived_pushforward(f.open_part, above.F)
    below = NearbyCycles(WrapTower(X, levels), pushed)
    upstairs = derived_pushforward_cochains(f.open_part, above.F)
    source = below.system
    target = level_pushforward(f.closed_part, above.system)
    components = {}
    for n in source.levels:
        S, T = source.obj(n), target.obj(n)
        low, high = below.tower.level(n), above.tower.level(n)
        lifted = f.open_level(n, above.tower, below.tower)
        K = derived_pushforward(lifted, above.pulled[n])
        downstairs = derived_pushforward_cochains(lifted, above.pulled[n])
        base_change = SheafMap(
            below.pulled[n],
            K,
            {
                z: chain_pullback(
                    high.open_projection, upstairs[low.open_projection(z)], downstairs[z]
                ).with_endpoints(below.pulled[n][z], K[z])
                for z in low.decomposition.open
            },
            check=False,
        )
        ends = derived_pushforward_cochains(f.closed_part, above.system.obj(n))
        pieces = {y: above.parts[n][y] for y in Y.closed}
        stalks = {}
        for x in X.closed:
            part = below.parts[n][x]
            through = Cochains(K, part.chains)
            around = Cochains(
                above.pulled[n],
                high.decomposition.open.chains(lifted.preimage(low.space.up((x, ORIGIN)))),
            )
            to_pushed = descent_map(around, through, downstairs)
            to_target = descent_map(around, ends[x], pieces)
            beta = to_target @ quasi_inverse(to_pushed) @ cochains_map(part, through, base_change)
            stalks[x] = beta.with_endpoints(S[x], T[x])
        components[n] = SheafMap(S, T, stalks, check=False)
    phi = LevelMap(source, target, components, check=False)
    return Comparison(phi, _is_equivalence(phi), f.is_proper)


class ShriekComparison(NamedTuple):
    # f0_! Ψ(F) -> Ψ(f_! F)
    gamma: LevelMap
    # Ψ(f^! G) -> f0^! Ψ(G), built for open inclusions only
    exchange: Optional[LevelMap]


def _level_extension(system: LevelSystem, decomposition: OpenClosedDecomposition, closed: bool) -> LevelSystem:
    extend, extend_map = (
        (closed_pushforward, closed_pushforward_map) if closed else (shriek_extension, shriek_extension_map)
    )
    actions = {
        n: CyclicAction(n, extend_map(decomposition, system.level(n).g), check=False) for n in system.levels
    }
    inflations = {pair: extend_map(decomposition, phi) for pair, phi in system.inflations.items()}
    return LevelSystem(system.levels, actions, inflations, check=False)


def comparison_shriek(
    f: ModelMap, F: SheafComplex, levels: Iterable[int], G: Optional[SheafComplex] = None
) -> ShriekComparison:
    """
    For an open or closed inclusion of models, the map
    ``f0_! Ψ(F) -> Ψ(f_! F)`` including the chain cochains of Y into those
    of X at every level. With a sheaf G on X and f open, also the exchange
    map ``Ψ(f^! G) -> f0^! Ψ(G)``, which is the pullback comparison since
    ``f^! = f*`` there.
    """
    X, Y = f.target, f.source
    is_open = f.f.is_open_inclusion()
    if not (is_open or f.f.is_closed_inclusion()) or any(f(y) != y for y in Y.total):
        raise HypothesisFailure("Extension by zero needs an open or closed inclusion", f)
    if F.base != Y.total:
        raise HypothesisFailure("Extension by zero needs a sheaf on the whole model", F.base.name)
    image = f.f.image()
    if is_open:
        extended = shriek_extension(OpenClosedDecomposition.from_open(X.total, image), F)
        special = OpenClosedDecomposition.from_open(X.closed, Y.closed)
    else:
        extended = closed_pushforward(OpenClosedDecomposition(X.total, image), F)
        special = OpenClosedDecomposition(X.closed, Y.closed)
    above = NearbyCycles(WrapTower(Y, levels), F)
    below = NearbyCycles(WrapTower(X, levels), extended)
    source = _level_extension(above.system, special, closed=not is_open)
    target = below.system
    components = {}
    for n in source.levels:
        S, T = source.obj(n), target.obj(n)
        if not len(Y.open):
            components[n] = SheafMap.zero(S, T)
            continue
        stalks = {
            x: (
                block_inclusion(above.parts[n][x], below.parts[n][x])
                if x in Y.closed
                else ChainMap.zero(S[x], T[x])
            ).with_endpoints(S[x], T[x])
            for x in X.closed
        }
        components[n] = SheafMap(S, T, stalks, check=False)
    gamma = LevelMap(source, target, components, check=False)
    exchange = None
    if G is not None:
        if is_open:
            exchange = comparison_pullback(f, G, levels).map
        else:
            logger.info("no exchange map for the closed inclusion %r", f)
    return ShriekComparison(gamma, exchange)


# ################################################################
# nearby cycles without the action
# ################################################################


class AyoubNearby(NamedTuple):
    # i* Rj_* of the pushforward from level N of the pair
    sheaf: SheafComplex
    pair: Tuple[int, int]
    pre_stable: bool
    # rank of level N1 -> level N in cohomology, per point and degree
    tables: Dict[Element, CohomologyTable]
    # descent identifies both levels with Ψ and the ranks match its stabilization
    agrees: bool


def _cover_pushforward(level: Level, pulled: SheafComplex) -> Tuple[SheafComplex, Dict[Element, Cochains]]:
    pushed = derived_pushforward(level.open_projection, pulled)
    return pushed, derived_pushforward_cochains(level.open_projection, pulled)


def _clean(table: CohomologyTable) -> CohomologyTable:
    return {k: v for k, v in table.items() if v}


def ayoub_nearby(model: GmModel, F: SheafComplex, levels: Iterable[int]) -> AyoubNearby:
    """
    ``i* Rj_* Rπ_n* π_n* F`` along the covers ``π_n: U^(n) -> U_X``, with
    no action, stabilized along the pair of levels ``N1 | N``.
    """
    nearby = NearbyCycles(WrapTower(model, levels), F)
    field = nearby.field
    tower = nearby.tower
    found = stabilization_pair(tower.levels, model.degree, field.ell)
    first, second = found if found is not None else (tower.levels[-1], tower.levels[-1])
    if not len(model.open):
        zero = SheafComplex.zero(model.closed, field, nearby.F.twist)
        return AyoubNearby(zero, (first, second), found is None, {x: {} for x in model.closed}, True)
    j = model.decomposition.j
    pushed = {n: _cover_pushforward(tower.level(n), nearby.pulled[n]) for n in (first, second)}
    u = tower.open_transition(first, second)
    (K1, parts1), (K2, parts2) = pushed[first], pushed[second]
    transition = SheafMap(
        K1,
        K2,
        {z: chain_pullback(u, parts1[z], parts2[z]).with_endpoints(K1[z], K2[z]) for z in model.open},
        check=False,
    )
    A1 = restrict(derived_pushforward(j, K1), model.closed)
    A2 = restrict(derived_pushforward(j, K2), model.closed)
    comparison = derived_pushforward_map(j, transition)
    tables = {}
    agrees = True
    for x in model.closed:
        phi = comparison(x).with_endpoints(A1[x], A2[x])
        tables[x] = _clean({k: phi.induced_rank(k) for k in A2[x].degrees()})
        for n in (first, second):
            K, parts = pushed[n]
            around = derived_pushforward_cochains(j, K)[x]
            if not descent_map(nearby.parts[n][x], around, parts).is_quasi_iso():
                agrees = False
        if tables[x] != _clean(stabilized(nearby.system, x, model.degree).table):
            agrees = False
    return AyoubNearby(A2, (first, second), found is None, tables, agrees)


# ################################################################
# Künneth
# ################################################################


class ProductModel(NamedTuple):
    model: GmModel
    left: ModelMap
    right: ModelMap


def fiber_product_model(X: GmModel, Y: GmModel) -> ProductModel:
    """
    ``X x_{D_k} Y`` with its two projections.
    """
    square = poset_pullback(X.p, Y.p)
    Z = GmModel(square.poset, X.p @ square.left, f"{X.name}x{Y.name}")
    return ProductModel(Z, ModelMap(Z, X, square.left), ModelMap(Z, Y, square.right))


class KunnethReport(NamedTuple):
    map: LevelMap
    product: GmModel
    levelwise: Dict[int, bool]
    # an isomorphism on stabilized cohomology at every point
    stabilized: bool


def _minimal_system(A: LevelSystem) -> Tuple[LevelSystem, Dict[int, Dict[Element, ChainMap]]]:
    """
    Stalkwise cohomology of a system of sheaves with the induced
    restrictions, actions and inflations, and the representative
    inclusions into the stalks of A.
    """
    models = {n: {x: minimal_model(A.obj(n)[x]) for x in A.obj(n).base} for n in A.levels}
    sheaves = {}
    for n in A.levels:
        F = A.obj(n)
        stalks = {x: models[n][x].complex for x in F.base}
        restrictions = {
            (x, y): minimal_map(F.restriction(x, y), stalks[x], stalks[y]) for x, y in F.base.covers
        }
        sheaves[n] = SheafComplex(F.base, stalks, restrictions, check=False)

    def induced(n: int, m: int, phi: SheafMap) -> SheafMap:
        S, T = sheaves[n], sheaves[m]
        return SheafMap(S, T, {x: minimal_map(phi(x), S[x], T[x]) for x in S.base}, check=False)

    actions = {n: CyclicAction(n, induced(n, n, A.level(n).g), check=False) for n in A.levels}
    inflations = {(n, m): induced(n, m, phi) for (n, m), phi in A.inflations.items()}
    inclusions = {n: {x: model.inclusion for x, model in models[n].items()} for n in A.levels}
    return LevelSystem(A.levels, actions, inflations, check=False), inclusions


def _tensor_system(A: LevelSystem, B: LevelSystem) -> LevelSystem:
    objects = {n: sheaf_tensor(A.obj(n), B.obj(n)) for n in A.levels}

    def tensored(n: int, m: int, f: SheafMap, g: SheafMap) -> SheafMap:
        S, T = objects[n], objects[m]
        return SheafMap(S, T, {z: tensor_maps(f(z), g(z)).with_endpoints(S[z], T[z]) for z in S.base}, check=False)

    actions = {n: CyclicAction(n, tensored(n, n, A.level(n).g, B.level(n).g), check=False) for n in A.levels}
    inflations = {(n, m): tensored(n, m, phi, B.inflation(n, m)) for (n, m), phi in A.inflations.items()}
    return LevelSystem(A.levels, actions, inflations, check=False)


def _stable_iso(phi: LevelMap, z: Element, degree: int) -> bool:
    field = phi.source.field
    source = stabilized(phi.source, z, degree)
    target = stabilized(phi.target, z, degree)
    top = source.pair[1]
    for k in set(source.table) | set(target.table):
        dim = target.table.get(k, 0)
        if source.table.get(k, 0) != dim:
            return False
        if not dim:
            continue
        images = field.mul(phi(top)(z).induced(k), source.bases[k])
        if field.rank(images) != dim or field.rank(np.hstack([target.bases[k], images])) != dim:
            return False
    return True


def kunneth_morphism(
    X: GmModel, F: SheafComplex, Y: GmModel, G: SheafComplex, levels: Iterable[int]
) -> KunnethReport:
    """
    ``Ψ(F) ⊠ Ψ(G) -> Ψ(F ⊠ G)`` on ``X x_{D_k} Y``: the two pullback
    comparisons tensored together, then the cup product of chain cochains
    at every level. The factors enter through their stalkwise cohomology,
    so the map is the Künneth morphism precomposed with a stalkwise
    quasi-isomorphism and the cochains of the product are never tensored.
    """
    Z, left, right = fiber_product_model(X, Y)
    if not len(Z.open):
        raise HypothesisFailure("The product has an empty generic fiber", Z.name)
    first, above_F = _pullback_comparison(left, F, levels)
    second, above_G = _pullback_comparison(right, G, levels)
    product = NearbyCycles(WrapTower(Z, levels), sheaf_tensor(above_F.F, above_G.F))
    A, into_A = _minimal_system(first.map.source)
    B, into_B = _minimal_system(second.map.source)
    source = _tensor_system(A, B)
    target = product.system
    components = {}
    for n in source.levels:
        S, T = source.obj(n), target.obj(n)
        stalks = {}
        for z in Z.closed:
            f = first.map(n)(z) @ into_A[n][z]
            g = second.map(n)(z) @ into_B[n][z]
            cup = cup_product(above_F.parts[n][z], above_G.parts[n][z], product.parts[n][z], f, g)
            stalks[z] = cup.with_endpoints(S[z], T[z])
        components[n] = SheafMap(S, T, stalks, check=False)
    phi = LevelMap(source, target, components, check=False)
    levelwise = {n: phi(n).is_quasi_iso() for n in source.levels}
    degree = lcm(X.degree, Y.degree)
    stable = all(_stable_iso(phi, z, degree) for z in Z.closed)
    logger.debug("Künneth on %r: levelwise %s", Z, levelwise)
    return KunnethReport(phi, Z, levelwise, stable)


# ################################################################
# monodromy invariant vanishing cycles
# ################################################################


def _origin_decomposition(k: int) -> OpenClosedDecomposition:
    return OpenClosedDecomposition(pseudodisk(k), [ORIGIN], codimension=1)


def default_datum(k: int, field: PrimeField) -> ChernDatum:
    """
    The fiber projection ``i^! Λ -> Λ`` at the origin of ``D_k``.
    """
    disk = pseudodisk(k)
    shriek = exceptional_pullback(_origin_decomposition(k), unit_sheaf(disk, field))
    return ChernDatum(shriek.projection(ORIGIN))


class MonodromyInvariant(NamedTuple):
    sheaf: SheafComplex
    datum: ChernDatum
    # cone(c) -> i* Rj_* Λ on the special fiber
    comparison: SheafMap


def monodromy_invariant_vanishing(
    model: GmModel, field: PrimeField, datum: Optional[ChernDatum] = None
) -> MonodromyInvariant:
    """
    The cofiber of ``cone(c) -> i* Rj_* Λ``. On the base the map is
    ``(a, b) -> u b + h a`` for the unit u and a null-homotopy h of
    ``u c``; it is pulled back to the model along ``p``.
    """
    disk = pseudodisk(model.k)
    decomposition = _origin_decomposition(model.k)
    Lambda = unit_sheaf(disk, field)
    shriek = exceptional_pullback(decomposition, Lambda)
    u = shriek.unit(ORIGIN)
    if datum is None:
        datum = ChernDatum(shriek.projection(ORIGIN))
        homotopy: Optional[Dict[int, Matrix]] = fiber_homotopy(u, datum.source)
    else:
        if datum.target.dims != u.source.dims:
            raise HypothesisFailure("A Chern datum lands in Λ", datum.target.dims)
        c = datum.c.with_endpoints(datum.source, u.source)
        homotopy = homotopy_between(u @ c, ChainMap.zero(c.source, u.target))
        if homotopy is None:
            raise HypothesisFailure("The unit does not kill the Chern datum")
    c = datum.c.with_endpoints(datum.source, u.source)
    base = triangle_map(c, u, homotopy)
    source = constant_sheaf(model.closed, base.source)
    if not len(model.open):
        target = SheafComplex.zero(model.closed, field)
        comparison = SheafMap.zero(source, target)
    else:
        circle = restrict(Lambda, decomposition.open)
        below = derived_pushforward_cochains(decomposition.j, circle)[ORIGIN]
        constant = unit_sheaf(model.open, field)
        above = derived_pushforward_cochains(model.decomposition.j, constant)
        target = restrict(derived_pushforward(model.decomposition.j, constant), model.closed)
        p = _restricted(model.p, model.open, decomposition.open)
        lifted = base.with_endpoints(base.source, below.complex)
        comparison = SheafMap(
            source,
            target,
            {
                x: (chain_pullback(p, below, above[x]) @ lifted).with_endpoints(source[x], target[x])
                for x in model.closed
            },
        )
    return MonodromyInvariant(sheaf_cone(comparison).sheaf, datum, comparison)


class MiComparison(NamedTuple):
    verdict: Verdict
    tame: bool
    window: Tuple[int, int]
    pre_stable: bool
    invariants: Dict[Element, CohomologyTable]
    monodromy_invariant: Dict[Element, CohomologyTable]


def compare_mi_vs_fixed(
    model: GmModel, field: PrimeField, levels: Iterable[int], window: Tuple[int, int] = (0, 4)
) -> MiComparison:
    """
    Invariants of the stabilized tame vanishing cycles against the
    monodromy invariant vanishing cycles. A monodromy of order prime to ℓ
    is averaged and compared in full; otherwise homotopy fixed points are
    compared on the degrees of `window` they compute correctly, and the
    outcome is only recorded.
    """
    a, b = window
    triple = total_nearby(model, unit_sheaf(model.total, field), levels)
    vanishing = EquivariantRecollement(model.closed, triple.open.levels).cofiber(triple)
    mi = monodromy_invariant_vanishing(model, field).sheaf
    tame = True
    pre_stable = False
    invariants = {}
    expected = {}
    guaranteed = window
    for x in model.closed:
        stable = stabilized(vanishing, x, model.degree)
        pre_stable = pre_stable or stable.pre_stable
        # the group acting is the one acting on Ψ, even where it acts trivially on Φ
        group = lcm(stable.order, stabilized(triple.open, x, model.degree).order)
        action = inflate(stabilized_complex(stable, field), group // stable.order)
        if math.gcd(action.n, field.ell) == 1:
            invariants[x] = _clean(fixed_points(action, action.n).action.obj.cohomology_table())
            expected[x] = _clean(mi[x].cohomology_table())
            continue
        tame = False
        fixed = homotopy_fixed_points(action, a, b)
        lo, hi = max(a, fixed.window[0]), min(b, fixed.window[1])
        guaranteed = (max(guaranteed[0], lo), min(guaranteed[1], hi))
        invariants[x] = _clean({k: v for k, v in fixed.complex.cohomology_table().items() if lo <= k <= hi})
        expected[x] = _clean({k: v for k, v in mi[x].cohomology_table().items() if lo <= k <= hi})
    agree = invariants == expected
    verdict: Verdict = ("PASS" if agree else "FAIL") if tame else "RECORDED"
    logger.info("Φ^t invariants against Φ^mi on %r: %s", model, verdict)
    return MiComparison(verdict, tame, guaranteed if not tame else window, pre_stable, invariants, expected)


def check_tower_localization(model: GmModel, F: SheafComplex, levels: Iterable[int]) -> List[int]:
    """
    Levels at which the localization triangles of the pulled back sheaf
    fail to be exact.
    """
    tower = WrapTower(model, levels)
    failing = []
    for n in tower.levels:
        level = tower.level(n)
        report = check_localization(level.decomposition, pullback_sheaf(level.projection, F))
        if not (report.open_closed and report.closed_open):
            failing.append(n)
    return failing
