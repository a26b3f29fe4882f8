"""
Finite posets as Alexandrov spaces: opens are up-sets, the minimal open
neighbourhood of ``x`` is ``{y >= x}`` and closed subsets are down-sets.
"""
import logging
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Set,
    Tuple,
)

import numpy as np

from .exceptions import HypothesisFailure, NotAPartialOrder, NotDownClosed, NotMonotone, NotUpClosed
from .typing import Chain, Element
from .utils import cached_property, sort_key

logger = logging.getLogger(__name__)

__all__ = [
    "FinitePoset",
    "MonotoneMap",
    "OpenClosedDecomposition",
    "PosetPullback",
    "point",
    "chain_poset",
    "pseudocircle",
    "pseudodisk",
    "covering_map",
    "deck_generator",
    "theta_map",
    "poset_pullback",
    "product_poset",
    "opposite_poset",
    "product_map",
    "is_isomorphism",
    "restrict_map",
    "disk_rotation",
    "disk_transition",
    "random_poset",
]


class FinitePoset:
    """
    A finite partial order. `relations` may be any generating set of pairs
    ``(a, b)`` meaning ``a <= b``; the reflexive transitive closure is taken
    and antisymmetry is checked.

    ```python
    P = FinitePoset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    P.leq("a", "c")  # True
    ```
    """

    def __init__(
        self,
        elements: Iterable[Element],
        relations: Iterable[Tuple[Element, Element]] = (),
        name: str = "",
    ) -> None:
        self.elements: Tuple[Element, ...] = tuple(elements)
        self.name = name
        self._index = {x: i for i, x in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise NotAPartialOrder("Repeated element", [repr(x) for x in self.elements])
        above: Dict[Element, Set[Element]] = {x: {x} for x in self.elements}
        for a, b in relations:
            if a not in self._index or b not in self._index:
                raise NotAPartialOrder("Relation mentions an unknown element", [repr(a), repr(b)])
            above[a].add(b)
        # transitive closure, Floyd-Warshall on sets
        for k in self.elements:
            for x in self.elements:
                if k in above[x]:
                    above[x] |= above[k]
        for x in self.elements:
            for y in above[x]:
                if y != x and x in above[y]:
                    raise NotAPartialOrder("Relation is not antisymmetric", [repr(x), repr(y)])
        self._above: Dict[Element, FrozenSet[Element]] = {x: frozenset(s) for x, s in above.items()}
        self._below: Dict[Element, FrozenSet[Element]] = {
            x: frozenset(y for y in self.elements if x in self._above[y]) for x in self.elements
        }

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<FinitePoset{label} with {len(self)} elements>"

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        return x in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return set(self.elements) == set(other.elements) and all(
            self._above[x] == other._above[x] for x in self.elements
        )

    def __hash__(self) -> int:
        return hash(frozenset(self.elements))

    def index(self, x: Element) -> int:
        return self._index[x]

    def leq(self, a: Element, b: Element) -> bool:
        return b in self._above[a]

    def lt(self, a: Element, b: Element) -> bool:
        return a != b and self.leq(a, b)

    def up(self, x: Element) -> FrozenSet[Element]:
        """
        The minimal open neighbourhood U_x.
        """
        return self._above[x]

    def down(self, x: Element) -> FrozenSet[Element]:
        return self._below[x]

    def sorted(self, subset: Iterable[Element]) -> List[Element]:
        """
        Elements of `subset` in the poset's own listing order.
        """
        return sorted(subset, key=self._index.__getitem__)

    @cached_property
    def covers(self) -> List[Tuple[Element, Element]]:
        """
        Hasse diagram: pairs ``x < y`` with nothing strictly between.
        """
        out = []
        for x in self.elements:
            for y in self.sorted(self._above[x]):
                if y == x:
                    continue
                if not any(self.lt(x, z) and self.lt(z, y) for z in self.elements):
                    out.append((x, y))
        return out

    def is_up_closed(self, subset: Iterable[Element]) -> bool:
        s = set(subset)
        return all(self._above[x] <= s for x in s)

    def is_down_closed(self, subset: Iterable[Element]) -> bool:
        s = set(subset)
        return all(self._below[x] <= s for x in s)

    def check_open(self, subset: Iterable[Element]) -> FrozenSet[Element]:
        s = frozenset(subset)
        if not s <= set(self.elements) or not self.is_up_closed(s):
            raise NotUpClosed(content=sorted(map(repr, s)))
        return s

    def check_closed(self, subset: Iterable[Element]) -> FrozenSet[Element]:
        s = frozenset(subset)
        if not s <= set(self.elements) or not self.is_down_closed(s):
            raise NotDownClosed(content=sorted(map(repr, s)))
        return s

    def up_closure(self, subset: Iterable[Element]) -> FrozenSet[Element]:
        out: Set[Element] = set()
        for x in subset:
            out |= self._above[x]
        return frozenset(out)

    def down_closure(self, subset: Iterable[Element]) -> FrozenSet[Element]:
        out: Set[Element] = set()
        for x in subset:
            out |= self._below[x]
        return frozenset(out)

    @cached_property
    def minimal_elements(self) -> List[Element]:
        return [x for x in self.elements if self._below[x] == {x}]

    @cached_property
    def maximal_elements(self) -> List[Element]:
        return [x for x in self.elements if self._above[x] == {x}]

    def chains(self, subset: Optional[Iterable[Element]] = None) -> List[Chain]:
        """
        Nonempty strictly increasing chains inside `subset` (default: all
        elements), listed by length then by position.
        """
        allowed = self.sorted(set(self.elements if subset is None else subset))
        out: List[Chain] = []

        def extend(chain: Chain) -> None:
            out.append(chain)
            last = chain[-1]
            for y in allowed:
                if self.lt(last, y):
                    extend(chain + (y,))

        for x in allowed:
            extend((x,))
        out.sort(key=lambda c: (len(c), [self._index[x] for x in c]))
        return out

    def chains_of_length(self, n: int, weak: bool = True) -> List[Chain]:
        """
        Sequences ``x_0 <= ... <= x_n`` (``<`` when not `weak`).
        """
        out: List[Chain] = []

        def extend(chain: Chain) -> None:
            if len(chain) == n + 1:
                out.append(chain)
                return
            for y in self.elements:
                if self.lt(chain[-1], y) or (weak and y == chain[-1]):
                    extend(chain + (y,))

        for x in self.elements:
            extend((x,))
        return out

    @cached_property
    def height(self) -> int:
        """
        Number of elements in a longest chain.
        """
        return max((len(c) for c in self.chains()), default=0)

    @cached_property
    def components(self) -> List[FrozenSet[Element]]:
        remaining = list(self.elements)
        out = []
        while remaining:
            seen = {remaining[0]}
            frontier = [remaining[0]]
            while frontier:
                x = frontier.pop()
                for y in self._above[x] | self._below[x]:
                    if y not in seen:
                        seen.add(y)
                        frontier.append(y)
            out.append(frozenset(seen))
            remaining = [x for x in remaining if x not in seen]
        return out

    def subposet(self, subset: Iterable[Element], name: str = "") -> "FinitePoset":
        s = set(subset)
        members = [x for x in self.elements if x in s]
        return FinitePoset(
            members,
            [(x, y) for x in members for y in self._above[x] if y in s and y != x],
            name,
        )

    def canonical(self) -> "FinitePoset":
        """
        The same poset listed in canonical (lexicographic) element order.
        """
        members = sorted(self.elements, key=sort_key)
        return FinitePoset(members, self.covers, self.name)


class MonotoneMap:
    """
    An order preserving map, continuous for the Alexandrov topologies.
    Composition is written ``g @ f``.
    """

    def __init__(
        self,
        source: FinitePoset,
        target: FinitePoset,
        values: Mapping[Element, Element],
        name: str = "",
        check: bool = True,
    ) -> None:
        self.source = source
        self.target = target
        self.values: Dict[Element, Element] = {x: values[x] for x in source} if check else dict(values)
        self.name = name
        if check:
            for x in source:
                if self.values[x] not in target:
                    raise NotMonotone("Value outside the target", [repr(x), repr(self.values[x])])
            for x, y in source.covers:
                if not target.leq(self.values[x], self.values[y]):
                    raise NotMonotone(content=[repr(x), repr(y)])

    def __call__(self, x: Element) -> Element:
        return self.values[x]

    def __repr__(self) -> str:
        return f"<MonotoneMap {self.name or ''} {self.source!r} -> {self.target!r}>"

    def __matmul__(self, other: "MonotoneMap") -> "MonotoneMap":
        return MonotoneMap(
            other.source,
            self.target,
            {x: self.values[other.values[x]] for x in other.source},
            check=False,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and all(self.values[x] == other.values[x] for x in self.source)
        )

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.values.items(), key=lambda kv: sort_key(kv[0]))))

    @classmethod
    def identity(cls, poset: FinitePoset) -> "MonotoneMap":
        return cls(poset, poset, {x: x for x in poset}, "id", check=False)

    @classmethod
    def constant(cls, source: FinitePoset, target: FinitePoset, value: Element) -> "MonotoneMap":
        return cls(source, target, {x: value for x in source})

    @classmethod
    def inclusion(cls, sub: FinitePoset, ambient: FinitePoset) -> "MonotoneMap":
        return cls(sub, ambient, {x: x for x in sub})

    def preimage(self, subset: Iterable[Element]) -> FrozenSet[Element]:
        s = set(subset)
        return frozenset(x for x in self.source if self.values[x] in s)

    def image(self) -> FrozenSet[Element]:
        return frozenset(self.values.values())

    def is_injective(self) -> bool:
        return len(set(self.values.values())) == len(self.values)

    def is_embedding(self) -> bool:
        return self.is_injective() and all(
            self.source.leq(x, y) == self.target.leq(self(x), self(y))
            for x in self.source
            for y in self.source
        )

    def is_open_inclusion(self) -> bool:
        return self.is_embedding() and self.target.is_up_closed(self.image())

    def is_closed_inclusion(self) -> bool:
        return self.is_embedding() and self.target.is_down_closed(self.image())

    def is_covering_like(self) -> bool:
        """
        The preimage of every minimal open is a disjoint union of minimal
        opens, each mapped isomorphically onto it.
        """
        for q in self.target:
            opens = self.target.up(q)
            fiber = self.preimage([q])
            pre = self.preimage(opens)
            covered: Set[Element] = set()
            for x in fiber:
                piece = self.source.up(x)
                if {self(y) for y in piece} != set(opens) or len(piece) != len(opens):
                    return False
                if covered & piece:
                    return False
                covered |= piece
            if covered != set(pre):
                return False
        return True


class OpenClosedDecomposition:
    """
    ``X = Z ⊔ U`` with ``Z`` closed. `codimension` labels the twist carried
    by the exceptional pullback to ``Z``.
    """

    def __init__(self, ambient: FinitePoset, closed: Iterable[Element], codimension: int = 0) -> None:
        self.ambient = ambient
        closed_set = ambient.check_closed(closed)
        self.closed = ambient.subposet(closed_set, "Z")
        self.open = ambient.subposet([x for x in ambient if x not in closed_set], "U")
        self.codimension = codimension
        self.i = MonotoneMap.inclusion(self.closed, ambient)
        self.j = MonotoneMap.inclusion(self.open, ambient)

    @classmethod
    def from_open(
        cls, ambient: FinitePoset, open: Iterable[Element], codimension: int = 0
    ) -> "OpenClosedDecomposition":
        ambient.check_open(open)
        s = set(open)
        return cls(ambient, [x for x in ambient if x not in s], codimension)

    def __repr__(self) -> str:
        return f"<OpenClosedDecomposition Z={len(self.closed)} U={len(self.open)}>"


# ################################################################
# standard spaces
# ################################################################


def point(name: Element = "pt") -> FinitePoset:
    return FinitePoset([name], name="point")


def chain_poset(n: int) -> FinitePoset:
    """
    The linear order ``[n] = {0 < 1 < ... < n}``.
    """
    return FinitePoset(range(n + 1), [(i, i + 1) for i in range(n)], f"[{n}]")


def _circle_name(m: int) -> str:
    return f"s{m}"


def pseudocircle(k: int) -> FinitePoset:
    """
    S_k: points ``s0 .. s{2k-1}``; even indices are closed points, each
    below its two odd neighbours.
    """
    if k < 2:
        raise HypothesisFailure("Pseudocircles need k >= 2", k)
    size = 2 * k
    relations = []
    for m in range(0, size, 2):
        relations.append((_circle_name(m), _circle_name((m + 1) % size)))
        relations.append((_circle_name(m), _circle_name((m - 1) % size)))
    return FinitePoset([_circle_name(m) for m in range(size)], relations, f"S_{k}")


ORIGIN = "0"


def pseudodisk(k: int) -> FinitePoset:
    """
    D_k: the pseudocircle with a minimum ``"0"`` added.
    """
    circle = pseudocircle(k)
    return FinitePoset(
        [ORIGIN] + list(circle.elements),
        [(ORIGIN, x) for x in circle] + list(circle.covers),
        f"D_{k}",
    )


def _circle_index(x: Element) -> int:
    return int(str(x)[1:])


def covering_map(k: int, n: int) -> MonotoneMap:
    """
    The degree-n cover ``S_{kn} -> S_k``, ``s_m -> s_{m mod 2k}``.
    """
    source, target = pseudocircle(k * n), pseudocircle(k)
    return MonotoneMap(
        source,
        target,
        {x: _circle_name(_circle_index(x) % (2 * k)) for x in source},
        f"cover({k},{n})",
    )


def deck_generator(k: int, n: int) -> MonotoneMap:
    """
    Rotation of S_{kn} by 2k positions, generating the Z/n deck group of
    `covering_map(k, n)`.
    """
    circle = pseudocircle(k * n)
    size = 2 * k * n
    return MonotoneMap(
        circle,
        circle,
        {x: _circle_name((_circle_index(x) + 2 * k) % size) for x in circle},
        f"deck({k},{n})",
    )


def theta_map(k: int, n: int) -> MonotoneMap:
    """
    ``D_{kn} -> D_k``: wraps the circle n times and fixes the origin.
    """
    source, target = pseudodisk(k * n), pseudodisk(k)
    values = {ORIGIN: ORIGIN}
    for x in source:
        if x != ORIGIN:
            values[x] = _circle_name(_circle_index(x) % (2 * k))
    return MonotoneMap(source, target, values, f"theta({k},{n})")


def disk_rotation(k: int, n: int) -> MonotoneMap:
    """
    The deck generator of `theta_map(k, n)`: rotation fixing the origin.
    """
    disk = pseudodisk(k * n)
    size = 2 * k * n
    values = {ORIGIN: ORIGIN}
    for x in disk:
        if x != ORIGIN:
            values[x] = _circle_name((_circle_index(x) + 2 * k) % size)
    return MonotoneMap(disk, disk, values, f"rotation({k},{n})")


def disk_transition(k: int, n: int, m: int) -> MonotoneMap:
    """
    ``D_{knm} -> D_{kn}``, the tower map from level ``nm`` to level ``n``.
    """
    source, target = pseudodisk(k * n * m), pseudodisk(k * n)
    values = {ORIGIN: ORIGIN}
    for x in source:
        if x != ORIGIN:
            values[x] = _circle_name(_circle_index(x) % (2 * k * n))
    return MonotoneMap(source, target, values, f"u({k};{n},{n * m})")


# ################################################################
# products and fiber products
# ################################################################


class PosetPullback(NamedTuple):
    poset: FinitePoset
    left: MonotoneMap
    right: MonotoneMap

    def induced(self, other_left: MonotoneMap, other_right: MonotoneMap) -> MonotoneMap:
        """
        The map from the apex of a commuting square into the pullback.
        """
        source = other_left.source
        return MonotoneMap(
            source,
            self.poset,
            {w: (other_left(w), other_right(w)) for w in source},
        )


def poset_pullback(f: MonotoneMap, g: MonotoneMap) -> PosetPullback:
    """
    ``A x_C B`` with the componentwise order and its two projections.
    """
    A, B = f.source, g.source
    elements = [(a, b) for a in A for b in B if f(a) == g(b)]
    members = set(elements)
    relations = []
    for a, b in elements:
        for a2 in A.up(a):
            for b2 in B.up(b):
                if (a2, b2) in members and (a2, b2) != (a, b):
                    relations.append(((a, b), (a2, b2)))
    P = FinitePoset(elements, relations, f"{A.name}x{B.name}")
    left = MonotoneMap(P, A, {e: e[0] for e in elements}, check=False)
    right = MonotoneMap(P, B, {e: e[1] for e in elements}, check=False)
    return PosetPullback(P, left, right)


def product_poset(A: FinitePoset, B: FinitePoset) -> PosetPullback:
    target = point()
    return poset_pullback(MonotoneMap.constant(A, target, "pt"), MonotoneMap.constant(B, target, "pt"))


def opposite_poset(P: FinitePoset) -> FinitePoset:
    return FinitePoset(P.elements, [(y, x) for x, y in P.covers], f"{P.name}^op")


def product_map(f: MonotoneMap, g: MonotoneMap) -> MonotoneMap:
    source = product_poset(f.source, g.source).poset
    target = product_poset(f.target, g.target).poset
    return MonotoneMap(source, target, {(a, b): (f(a), g(b)) for a, b in source})


def is_isomorphism(f: MonotoneMap) -> bool:
    return f.is_embedding() and len(f.image()) == len(f.target)


def restrict_map(f: MonotoneMap, sub: FinitePoset) -> MonotoneMap:
    return MonotoneMap(sub, f.target, {x: f(x) for x in sub}, check=False)


def random_poset(rng: np.random.Generator, size: int, density: float = 0.4) -> FinitePoset:
    """
    Random order on ``p0 .. p{size-1}``: each pair ``i < j`` is related with
    probability `density`, then closed transitively.
    """
    names = [f"p{i}" for i in range(size)]
    relations = [
        (names[i], names[j])
        for i in range(size)
        for j in range(i + 1, size)
        if rng.random() < density
    ]
    return FinitePoset(names, relations, f"random({size})")
