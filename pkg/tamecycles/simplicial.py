"""
Finite simplicial sets, nerves and correspondence diagrams.

A tower of finite posets ``X: A^op -> Posets`` together with a closed piece
``X_0(e) -> X(e)`` at the minimum of A produces, for every simplex
``(a, s)`` of ``N(A^op) x Δ^1``, a grid diagram over ``[n] x [n]^op``
whose vertical maps are tower transitions and whose horizontal maps are the
closed inclusions. Mapping spaces of the grid are the posets of chains with
fixed endpoints; a chain acts through the lowest staircase path through it.
"""
import functools
import itertools
import logging
from typing import Callable, Dict, Generic, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, TypeVar

from .exceptions import HypothesisFailure, IncomparableEndpoints, MissingTransition
from .posets import (
    ORIGIN,
    FinitePoset,
    MonotoneMap,
    chain_poset,
    disk_transition,
    is_isomorphism,
    opposite_poset,
    poset_pullback,
    product_poset,
    pseudodisk,
)
from .typing import Chain, Element, Final

logger = logging.getLogger(__name__)

__all__ = [
    "SimplicialSet",
    "nerve",
    "GridPoint",
    "grid_poset",
    "grid_leq",
    "grid_order",
    "GridChainPoset",
    "grid_chains",
    "staircase_paths",
    "minimal_path",
    "is_below",
    "check_minimal_path",
    "TowerInstance",
    "pseudodisk_tower",
    "constant_tower",
    "doubled_closed_level",
    "CorrespondenceDiagram",
    "build_dn",
    "correspondence_source",
    "simplices",
    "AssemblyReport",
    "assemble_d",
]

DEFAULT_DIMENSION_CAP: Final = 3

S = TypeVar("S")

GridPoint = Tuple[int, int]
Path = Tuple[GridPoint, ...]


class SimplicialSet(Generic[S]):
    """
    Simplices up to dimension `cap` with face maps ``d(i, x)`` and
    degeneracies ``s(i, x)``.
    """

    def __init__(
        self,
        simplices: Dict[int, List[S]],
        face: Callable[[int, S], S],
        degeneracy: Callable[[int, S], S],
        cap: int,
    ) -> None:
        self.simplices = simplices
        self._face = face
        self._degeneracy = degeneracy
        self.cap = cap
        self._members = {k: set(v) for k, v in simplices.items()}

    def __repr__(self) -> str:
        counts = [len(self.simplices[k]) for k in range(self.cap + 1)]
        return f"<SimplicialSet {counts}>"

    def d(self, i: int, x: S) -> S:
        return self._face(i, x)

    def s(self, i: int, x: S) -> S:
        return self._degeneracy(i, x)

    def is_degenerate(self, k: int, x: S) -> bool:
        return k > 0 and any(self.s(i, self.d(i, x)) == x for i in range(k))

    def nondegenerate(self, k: int) -> List[S]:
        return [x for x in self.simplices[k] if not self.is_degenerate(k, x)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(self.nondegenerate(k)) for k in range(self.cap + 1))

    def check_identities(self) -> List[str]:
        """
        All simplicial identities on every simplex up to the cap. Returns
        the failures.
        """
        failures = []
        for k in range(self.cap + 1):
            for x in self.simplices[k]:
                if k >= 1:
                    for i in range(k + 1):
                        if self.d(i, x) not in self._members[k - 1]:
                            failures.append(f"d_{i} {x!r} leaves the simplices")
                if k >= 2:
                    for i, j in itertools.combinations(range(k + 1), 2):
                        if self.d(i, self.d(j, x)) != self.d(j - 1, self.d(i, x)):
                            failures.append(f"d_{i} d_{j} on {x!r}")
                for i in range(k + 1):
                    for j in range(i, k + 1):
                        if self.s(i, self.s(j, x)) != self.s(j + 1, self.s(i, x)):
                            failures.append(f"s_{i} s_{j} on {x!r}")
                for j in range(k + 1):
                    y = self.s(j, x)
                    for i in range(k + 2):
                        if i < j:
                            expected = self.s(j - 1, self.d(i, x))
                        elif i in (j, j + 1):
                            expected = x
                        else:
                            expected = self.s(j, self.d(i - 1, x))
                        if self.d(i, y) != expected:
                            failures.append(f"d_{i} s_{j} on {x!r}")
        return failures


def _drop(i: int, x: Chain) -> Chain:
    return x[:i] + x[i + 1 :]


def _repeat(i: int, x: Chain) -> Chain:
    return x[: i + 1] + x[i:]


def nerve(P: FinitePoset, cap: int = DEFAULT_DIMENSION_CAP) -> "SimplicialSet[Chain]":
    """
    k-simplices are the weak chains ``x_0 <= ... <= x_k``.
    """
    simplices = {k: P.chains_of_length(k, weak=True) for k in range(cap + 1)}
    return SimplicialSet(simplices, _drop, _repeat, cap)


# ################################################################
# grids
# ################################################################


def grid_leq(a: GridPoint, b: GridPoint) -> bool:
    """
    The order of ``[n] x [n]^op``.
    """
    return a[0] <= b[0] and a[1] >= b[1]


def grid_poset(n: int) -> FinitePoset:
    points = [(i, j) for i in range(n + 1) for j in range(n + 1)]
    relations = [((i, j), (i + 1, j)) for i in range(n) for j in range(n + 1)]
    relations += [((i, j), (i, j - 1)) for i in range(n + 1) for j in range(1, n + 1)]
    return FinitePoset(points, relations, f"[{n}]x[{n}]^op")


def grid_order(point: GridPoint) -> Tuple[int, int]:
    """
    Sort key listing the points of a grid chain from bottom to top.
    """
    return point[0], -point[1]


@functools.lru_cache(maxsize=None)
def _chains_between(start: GridPoint, end: GridPoint) -> Tuple[Chain, ...]:
    found: List[Chain] = []

    def extend(chain: Tuple[GridPoint, ...]) -> None:
        last = chain[-1]
        if last == end:
            found.append(chain)
            return
        for i in range(last[0], end[0] + 1):
            for j in range(last[1], end[1] - 1, -1):
                if (i, j) != last and grid_leq((i, j), end):
                    extend(chain + ((i, j),))

    extend((start,))
    return tuple(found)


class GridChainPoset:
    """
    Chains of the interval ``[start, end]`` of ``[n] x [n]^op`` containing
    both endpoints, ordered by inclusion.
    """

    def __init__(self, n: int, start: GridPoint, end: GridPoint) -> None:
        if not (grid_leq(start, end) and max(start + end) <= n and min(start + end) >= 0):
            raise IncomparableEndpoints(content=[start, end])
        self.n = n
        self.start = start
        self.end = end
        self.chains: Tuple[Chain, ...] = _chains_between(start, end)
        self._poset: Optional[FinitePoset] = None

    def __repr__(self) -> str:
        return f"<GridChainPoset {self.start} -> {self.end} ({len(self.chains)} chains)>"

    def __iter__(self) -> Iterator[Chain]:
        return iter(self.chains)

    def __len__(self) -> int:
        return len(self.chains)

    @property
    def poset(self) -> FinitePoset:
        if self._poset is None:
            members = set(self.chains)
            relations = []
            for chain in self.chains:
                for i in range(self.start[0], self.end[0] + 1):
                    for j in range(self.end[1], self.start[1] + 1):
                        if (i, j) in chain:
                            continue
                        bigger = tuple(sorted(chain + ((i, j),), key=grid_order))
                        if bigger in members:
                            relations.append((chain, bigger))
            self._poset = FinitePoset(self.chains, relations, f"P{self.start}{self.end}")
        return self._poset


def grid_chains(n: int, start: GridPoint, end: GridPoint) -> GridChainPoset:
    return GridChainPoset(n, start, end)


def _lowest_segment(a: GridPoint, b: GridPoint) -> Path:
    # advance the first coordinate first, then lower the second
    path = [a]
    i, j = a
    while i < b[0]:
        i += 1
        path.append((i, j))
    while j > b[1]:
        j -= 1
        path.append((i, j))
    return tuple(path)


def minimal_path(chain: Sequence[GridPoint]) -> Path:
    """
    The lowest maximal chain through every point of `chain`. The second
    axis is reversed, so a path is lower the longer it keeps its second
    coordinate high.
    """
    points = sorted(chain, key=grid_order)
    if not points:
        raise HypothesisFailure("A grid chain has at least one point")
    path: List[GridPoint] = [points[0]]
    for a, b in zip(points, points[1:]):
        path.extend(_lowest_segment(a, b)[1:])
    return tuple(path)


@functools.lru_cache(maxsize=None)
def _minimal_path(chain: Tuple[GridPoint, ...]) -> Path:
    return minimal_path(chain)


def staircase_paths(start: GridPoint, end: GridPoint) -> List[Path]:
    """
    Every maximal chain from `start` to `end`.
    """
    right, down = end[0] - start[0], start[1] - end[1]
    if right < 0 or down < 0:
        return []
    paths = []
    for moves in itertools.combinations(range(right + down), right):
        i, j = start
        path = [start]
        chosen = set(moves)
        for step in range(right + down):
            if step in chosen:
                i += 1
            else:
                j -= 1
            path.append((i, j))
        paths.append(tuple(path))
    return paths


def _profile(path: Path) -> Dict[int, int]:
    profile: Dict[int, int] = {}
    for i, j in path:
        profile[i] = min(profile.get(i, j), j)
    return profile


def is_below(first: Path, second: Path) -> bool:
    """
    `first` keeps its second coordinate at least as high as `second` in
    every column.
    """
    a, b = _profile(first), _profile(second)
    return all(a[i] >= b[i] for i in a)


def check_minimal_path(chain: Sequence[GridPoint]) -> bool:
    """
    Exactly one path through `chain` lies below every other, and it is
    `minimal_path(chain)`.
    """
    points = sorted(chain, key=grid_order)
    candidates = [p for p in staircase_paths(points[0], points[-1]) if set(points) <= set(p)]
    lowest = [p for p in candidates if all(is_below(p, q) for q in candidates)]
    return lowest == [minimal_path(points)]


# ################################################################
# towers
# ################################################################


class TowerInstance:
    """
    ``X: A^op -> Posets`` on a finite index poset with minimum e, with
    transitions ``X(a <= b): X(b) -> X(a)`` and a closed subset of ``X(e)``.
    The closed tower is ``X_0(a) = X_0(e) x_{X(e)} X(a)`` unless given
    explicitly as `special` spaces, `special_transitions` and `inclusions`.
    `in_class` decides membership in the designated class of maps.
    """

    def __init__(
        self,
        index: FinitePoset,
        spaces: Dict[Element, FinitePoset],
        transitions: Dict[Tuple[Element, Element], MonotoneMap],
        closed: Iterable[Element],
        in_class: Optional[Callable[[MonotoneMap], bool]] = None,
        special: Optional[Dict[Element, FinitePoset]] = None,
        special_transitions: Optional[Dict[Tuple[Element, Element], MonotoneMap]] = None,
        inclusions: Optional[Dict[Element, MonotoneMap]] = None,
        name: str = "",
    ) -> None:
        minima = index.minimal_elements
        if len(minima) != 1 or any(not index.leq(minima[0], a) for a in index):
            raise HypothesisFailure("Index poset needs a minimum", index.name)
        self.index = index
        self.minimum = minima[0]
        self.spaces = spaces
        self.name = name or index.name
        self.in_class: Callable[[MonotoneMap], bool] = in_class or (lambda f: True)
        self.transitions: Dict[Tuple[Element, Element], MonotoneMap] = {}
        for a in index:
            for b in index.up(a):
                if a == b:
                    self.transitions[(a, b)] = MonotoneMap.identity(spaces[a])
                elif (a, b) in transitions:
                    self.transitions[(a, b)] = transitions[(a, b)]
                else:
                    raise MissingTransition(f"Missing transition {a!r} <= {b!r}", (a, b))
        e = self.minimum
        base = spaces[e]
        self.closed = base.subposet(base.check_closed(closed), f"{base.name}_0")
        if special is None:
            self._derive_special()
        else:
            if special_transitions is None or inclusions is None:
                raise HypothesisFailure("An explicit closed tower needs its maps")
            self.special = special
            self.special_transitions = dict(special_transitions)
            for a in index:
                self.special_transitions.setdefault((a, a), MonotoneMap.identity(special[a]))
            self.inclusions = inclusions

    def __repr__(self) -> str:
        return f"<TowerInstance {self.name} on {len(self.index)} indices>"

    def _derive_special(self) -> None:
        e = self.minimum
        i_e = MonotoneMap.inclusion(self.closed, self.spaces[e])
        squares = {a: poset_pullback(i_e, self.transitions[(e, a)]) for a in self.index}
        self.special = {a: squares[a].poset for a in self.index}
        self.inclusions = {a: squares[a].right for a in self.index}
        self.special_transitions = {}
        for (a, b), f in self.transitions.items():
            source, target = self.special[b], self.special[a]
            self.special_transitions[(a, b)] = MonotoneMap(
                source, target, {(z, x): (z, f(x)) for z, x in source}, check=False
            )

    def check(self) -> List[str]:
        """
        Strict composition of both towers, membership of every transition
        in the class, and closure of the class under composition and under
        pullback along the closed inclusion.
        """
        failures = []
        for towers, label in ((self.transitions, "X"), (self.special_transitions, "X_0")):
            for (a, b), f in towers.items():
                if not self.in_class(f):
                    failures.append(f"{label}({a!r} <= {b!r}) is not in the class")
                for c in self.index.up(b):
                    if towers[(a, c)] != f @ towers[(b, c)]:
                        failures.append(f"{label} does not compose along {a!r} <= {b!r} <= {c!r}")
        for a in self.index:
            if not self.in_class(MonotoneMap.identity(self.spaces[a])):
                failures.append(f"identity of X({a!r}) is not in the class")
            for b in self.index.up(a):
                pulled = poset_pullback(self.inclusions[a], self.transitions[(a, b)]).left
                if not self.in_class(pulled):
                    failures.append(f"pullback of X({a!r} <= {b!r}) is not in the class")
        return failures


def pseudodisk_tower(k: int, levels: Sequence[int]) -> TowerInstance:
    """
    ``n -> D_{kn}`` over the divisibility order with the wrap transitions
    and the origin as closed piece.
    """
    chosen = sorted(set(levels))
    if 1 not in chosen:
        raise HypothesisFailure("levels must contain 1", chosen)
    index = FinitePoset(
        chosen, [(n, m) for n in chosen for m in chosen if n != m and m % n == 0], "levels"
    )
    spaces = {n: pseudodisk(k * n) for n in chosen}
    transitions = {
        (n, m): disk_transition(k, n, m // n) for n in chosen for m in chosen if n != m and m % n == 0
    }
    return TowerInstance(index, spaces, transitions, [ORIGIN], name=f"D_{k} tower")


def constant_tower(P: FinitePoset, closed: Iterable[Element], levels: Sequence[int]) -> TowerInstance:
    chosen = sorted(set(levels))
    index = FinitePoset(chosen, [(n, m) for n in chosen for m in chosen if n != m and m % n == 0], "levels")
    spaces = {n: P for n in chosen}
    transitions = {(n, m): MonotoneMap.identity(P) for n in chosen for m in chosen if n != m and m % n == 0}
    return TowerInstance(index, spaces, transitions, closed, name=f"constant {P.name}")


def doubled_closed_level(tower: TowerInstance, level: Element) -> TowerInstance:
    """
    A copy of `tower` whose closed piece at `level` is doubled. The tower
    maps still compose strictly, but the squares through `level` stop
    being pullbacks.
    """
    special = dict(tower.special)
    original = tower.special[level]
    doubled = product_poset(original, FinitePoset([0, 1], (), "2")).poset
    special[level] = doubled
    inclusions = dict(tower.inclusions)
    inclusions[level] = MonotoneMap(
        doubled, tower.spaces[level], {(x, t): tower.inclusions[level](x) for x, t in doubled}, check=False
    )
    special_transitions = {}
    for (a, b), f in tower.special_transitions.items():
        if a == b:
            continue
        if b == level:
            f = MonotoneMap(doubled, f.target, {(x, t): f(x) for x, t in doubled}, check=False)
        elif a == level:
            f = MonotoneMap(f.source, doubled, {x: (f(x), 0) for x in f.source}, check=False)
        special_transitions[(a, b)] = f
    transitions = {pair: g for pair, g in tower.transitions.items() if pair[0] != pair[1]}
    return TowerInstance(
        tower.index,
        tower.spaces,
        transitions,
        tower.closed,
        tower.in_class,
        special,
        special_transitions,
        inclusions,
        name=f"{tower.name} doubled at {level!r}",
    )


# ################################################################
# correspondence diagrams
# ################################################################


class CorrespondenceDiagram:
    """
    The grid diagram of a simplex ``(a, s)``: `a` is a chain of ``A^op``
    (``a_0 >= ... >= a_n`` in A) and `s` a chain of ``[1]^op``
    (``s_0 >= ... >= s_n``). The object at ``(i, j)`` is ``X(a_i)`` when
    ``s_j = 1`` and ``X_0(a_i)`` otherwise. Vertical steps are tower
    transitions; a horizontal step is an identity or the closed inclusion.
    """

    def __init__(self, tower: TowerInstance, a: Sequence[Element], s: Sequence[int]) -> None:
        if len(a) != len(s):
            raise HypothesisFailure("A simplex has components of equal length", (len(a), len(s)))
        if any(not tower.index.leq(y, x) for x, y in zip(a, a[1:])):
            raise HypothesisFailure("Not a chain of the opposite index poset", list(a))
        if any(t not in (0, 1) for t in s) or any(x < y for x, y in zip(s, s[1:])):
            raise HypothesisFailure("Not a chain of the opposite of [1]", list(s))
        self.tower = tower
        self.a: Tuple[Element, ...] = tuple(a)
        self.s: Tuple[int, ...] = tuple(s)
        self.n = len(a) - 1
        self._composites: Dict[Path, MonotoneMap] = {}

    def __repr__(self) -> str:
        return f"<CorrespondenceDiagram a={list(self.a)} s={list(self.s)}>"

    def object(self, point: GridPoint) -> FinitePoset:
        i, j = point
        t = self.tower
        return t.spaces[self.a[i]] if self.s[j] else t.special[self.a[i]]

    def step(self, source: GridPoint, target: GridPoint) -> MonotoneMap:
        """
        The map of a single step of a staircase path.
        """
        (i, j), (i2, j2) = source, target
        t = self.tower
        if (i2, j2) == (i + 1, j):
            pair = (self.a[i + 1], self.a[i])
            return t.transitions[pair] if self.s[j] else t.special_transitions[pair]
        if (i2, j2) == (i, j - 1):
            if self.s[j] == self.s[j - 1]:
                return MonotoneMap.identity(self.object(source))
            return t.inclusions[self.a[i]]
        raise HypothesisFailure("Not a single grid step", (source, target))

    def path_map(self, path: Path) -> MonotoneMap:
        if path not in self._composites:
            current = MonotoneMap.identity(self.object(path[0]))
            for a, b in zip(path, path[1:]):
                current = self.step(a, b) @ current
            self._composites[path] = current
        return self._composites[path]

    def morphism(self, chain: Sequence[GridPoint]) -> MonotoneMap:
        """
        The composite of the steps of the minimal path through `chain`.
        """
        return self.path_map(_minimal_path(tuple(chain)))

    def points(self) -> List[GridPoint]:
        return [(i, j) for i in range(self.n + 1) for j in range(self.n + 1)]

    def check_functoriality(self) -> List[str]:
        """
        Inclusions of chains act by identities: every chain of a mapping
        poset maps to the same morphism, and endpoint morphisms compose.
        """
        failures = []
        points = self.points()
        for x in points:
            for y in points:
                if not grid_leq(x, y):
                    continue
                direct = self.morphism((x, y) if x != y else (x,))
                for chain in grid_chains(self.n, x, y):
                    if self.morphism(chain) != direct:
                        failures.append(f"{self!r}: chain {chain!r} acts differently")
                for z in points:
                    if grid_leq(y, z) and x != y != z:
                        if self.morphism((x, z)) != self.morphism((y, z)) @ direct:
                            failures.append(f"{self!r}: {x!r} -> {y!r} -> {z!r} does not compose")
        return failures

    def check_cartesian(self) -> List[str]:
        """
        Every square with corners ``(i, j), (i, j'), (i', j), (i', j')``
        for ``i <= i'`` and ``j >= j'`` is a pullback, and vertical maps
        lie in the class.
        """
        failures = []
        n = self.n
        for i, i2 in itertools.combinations_with_replacement(range(n + 1), 2):
            for j2, j in itertools.combinations_with_replacement(range(n + 1), 2):
                top = self.morphism(((i, j), (i, j2)) if j != j2 else ((i, j),))
                left = self.morphism(((i, j), (i2, j)) if i != i2 else ((i, j),))
                right = self.morphism(((i, j2), (i2, j2)) if i != i2 else ((i, j2),))
                bottom = self.morphism(((i2, j), (i2, j2)) if j != j2 else ((i2, j),))
                if i != i2 and not self.tower.in_class(left):
                    failures.append(f"{self!r}: vertical map at column {j} is not in the class")
                square = poset_pullback(right, bottom)
                if not is_isomorphism(square.induced(top, left)):
                    failures.append(f"{self!r}: square ({i},{j})..({i2},{j2}) is not a pullback")
        return failures


def build_dn(tower: TowerInstance, a: Sequence[Element], s: Sequence[int]) -> CorrespondenceDiagram:
    return CorrespondenceDiagram(tower, a, s)


class AssemblyReport(NamedTuple):
    holds: bool
    simplices: int
    failures: List[str]


def _restricted_equal(big: CorrespondenceDiagram, small: CorrespondenceDiagram, keep: List[int]) -> bool:
    """
    `small` is `big` on the rows and columns `keep`.
    """
    for x, y in itertools.product(small.points(), repeat=2):
        if not grid_leq(x, y):
            continue
        X, Y = (keep[x[0]], keep[x[1]]), (keep[y[0]], keep[y[1]])
        if small.object(x) != big.object(X):
            return False
        if x != y and small.morphism((x, y)) != big.morphism((X, Y)):
            return False
    return True


def correspondence_source(tower: TowerInstance, cap: int = DEFAULT_DIMENSION_CAP) -> "SimplicialSet[Chain]":
    """
    ``N(A^op) x Δ^1`` as the nerve of the product poset; a simplex is a
    chain of pairs ``(a_i, s_i)``.
    """
    return nerve(product_poset(opposite_poset(tower.index), opposite_poset(chain_poset(1))).poset, cap)


def simplices(source: "SimplicialSet[Chain]", n: int) -> List[Tuple[Chain, Tuple[int, ...]]]:
    return [(tuple(a for a, _ in x), tuple(s for _, s in x)) for x in source.simplices[n]]


def assemble_d(tower: TowerInstance, cap: int = DEFAULT_DIMENSION_CAP) -> AssemblyReport:
    """
    Builds the diagram of every simplex up to dimension `cap` and checks
    functoriality, the pullback squares, compatibility with all faces and
    degeneracies, and that the constant rows reproduce the two towers.
    """
    failures = list(tower.check())
    count = 0
    diagrams: Dict[Tuple[Chain, Tuple[int, ...]], CorrespondenceDiagram] = {}
    source = correspondence_source(tower, cap)
    for n in range(cap + 1):
        for a, s in simplices(source, n):
            diagrams[(a, s)] = build_dn(tower, a, s)
    for (a, s), D in diagrams.items():
        count += 1
        failures.extend(D.check_functoriality())
        failures.extend(D.check_cartesian())
        n = D.n
        if n >= 1 and len(set(s)) == 1:
            full = D.morphism(((0, 0), (n, 0)))
            pair = (a[n], a[0])
            expected = tower.transitions[pair] if s[0] else tower.special_transitions[pair]
            if full != expected:
                failures.append(f"{D!r}: constant row is not the tower map")
        for k in range(n + 1):
            if n >= 1:
                face = diagrams[(a[:k] + a[k + 1 :], s[:k] + s[k + 1 :])]
                keep = [i for i in range(n + 1) if i != k]
                if not _restricted_equal(D, face, keep):
                    failures.append(f"{D!r}: face d_{k} does not match")
            if n < cap:
                degenerate = diagrams[(a[: k + 1] + a[k:], s[: k + 1] + s[k:])]
                keep = [i for i in range(n + 2) if i != k + 1]
                if not _restricted_equal(degenerate, D, keep):
                    failures.append(f"{D!r}: degeneracy s_{k} does not restrict back")
                for j in range(n + 2):
                    inserted_row = degenerate.morphism(((k, j), (k + 1, j)))
                    if inserted_row != MonotoneMap.identity(degenerate.object((k, j))):
                        failures.append(f"{D!r}: degeneracy s_{k} inserts a non-identity row")
                    inserted_column = degenerate.morphism(((j, k + 1), (j, k)))
                    if inserted_column != MonotoneMap.identity(degenerate.object((j, k + 1))):
                        failures.append(f"{D!r}: degeneracy s_{k} inserts a non-identity column")
    logger.info("assembled %d simplices of %r with %d failures", count, tower, len(failures))
    return AssemblyReport(not failures, count, failures)
