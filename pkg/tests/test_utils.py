import pytest

from tamecycles.utils import (
    cached_property,
    divisors,
    in_residue_range,
    is_lcm_closed,
    is_prime,
    lcm,
    lcm_closure,
    sort_key,
)


def test_cached_property():
    class T:
        @cached_property
        def li(self):
            return object()

    assert T.li.__name__ == "li"
    assert not callable(T.li)
    t = T()
    assert t.li is t.li


@pytest.mark.parametrize("n,result", [(0, False), (1, False), (2, True), (9, False), (13, True)])
def test_is_prime(n, result):
    assert is_prime(n) is result


def test_divisibility():
    assert lcm(4, 6) == 12
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert lcm_closure([2, 3]) == [1, 2, 3, 6]
    assert is_lcm_closed([1, 2, 3, 6])
    assert not is_lcm_closed([1, 2, 3])


@pytest.mark.parametrize(
    "n,p,result",
    [(6, 0, True), (6, 5, True), (10, 5, False), (0, 0, False)],
)
def test_in_residue_range(n, p, result):
    assert in_residue_range(n, p) is result


def test_sort_key_is_total_on_mixed_elements():
    assert sorted(["b", 1, "a", (0, "0")], key=sort_key) == [1, "a", "b", (0, "0")]
