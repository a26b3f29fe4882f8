import functools
import math
import typing

T = typing.TypeVar("T")


class cached_property(typing.Generic[T]):
    """
    A property that is only computed once per instance and then replaces
    itself with an ordinary attribute. Deleting the attribute resets the
    property.
    """

    def __init__(self, func: typing.Callable[..., T]) -> None:
        self.func = func
        functools.update_wrapper(self, func)

    @typing.overload
    def __get__(self, obj: None, cls: type) -> "cached_property":
        ...

    @typing.overload
    def __get__(self, obj: object, cls: type) -> T:
        ...

    def __get__(self, obj, cls):
        if obj is None:
            return self
        value = obj.__dict__[self.func.__name__] = self.func(obj)
        return value


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def divisors(n: int) -> typing.List[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def lcm_closure(levels: typing.Iterable[int]) -> typing.List[int]:
    """
    Smallest set containing `levels` and 1 that is closed under lcm.
    """
    closed = set(levels) | {1}
    while True:
        extra = {lcm(a, b) for a in closed for b in closed} - closed
        if not extra:
            return sorted(closed)
        closed |= extra


def is_lcm_closed(levels: typing.Iterable[int]) -> bool:
    given = set(levels)
    return all(lcm(a, b) in given for a in given for b in given)


def in_residue_range(n: int, residue_characteristic: int) -> bool:
    """
    Membership in the divisibility poset of integers invertible in the
    residue field; characteristic 0 imposes no condition.
    """
    return n >= 1 and (
        residue_characteristic == 0 or math.gcd(n, residue_characteristic) == 1
    )


def sort_key(element: typing.Any) -> typing.Tuple[str, str]:
    """
    Canonical lexicographic order on heterogeneous poset elements.
    """
    return (type(element).__name__, repr(element))
