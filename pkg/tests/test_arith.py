import pytest

from buchi.arith import (
    ArithError, digit_at, expansion, from_expansion, g, is_power, log_power, num_digits,
    powers_upto, restrict, tuple_expansion, v_k,
)


def slow_vk(k, x):
    if x == 0:
        return 0
    p = 1
    while x % (p * k) == 0:
        p *= k
    return p


def test_vk_examples():
    assert v_k(2, 0) == 0
    assert v_k(2, 12) == 4
    assert v_k(3, 9) == 9
    assert v_k(2, 7) == 1


@pytest.mark.parametrize("k", [2, 3, 5])
def test_vk_against_repeated_division(k):
    for x in range(1, min(k**8, 20000)):
        v = v_k(k, x)
        assert x % v == 0 and is_power(k, v) and x % (v * k) != 0
        assert v == slow_vk(k, x)


def test_vk_large():
    x = 3**40 * 7
    assert v_k(3, x) == 3**40
    assert v_k(3, 0) == 0


def test_is_power():
    assert is_power(2, 1) and is_power(2, 8)
    assert not is_power(2, 12) and not is_power(2, 0)
    assert is_power(10, 10**30)
    assert log_power(3, 81) == 4


def test_bad_base_and_values():
    with pytest.raises(ArithError):
        v_k(1, 3)
    with pytest.raises(ArithError):
        v_k(2, -1)


def test_expansion_examples():
    assert expansion(2, 0) == []
    assert expansion(2, 13) == [1, 0, 1, 1]
    assert expansion(10, 305, 4) == [5, 0, 3, 0]
    with pytest.raises(ArithError):
        expansion(2, 8, 3)


@pytest.mark.parametrize("k", [2, 3])
def test_expansion_round_trip(k):
    for x in range(k**6):
        n = num_digits(k, x)
        for length in (n, n + 2):
            assert from_expansion(k, expansion(k, x, length)) == x
        assert len(expansion(k, x)) == n


def test_tuple_expansion():
    assert tuple_expansion(2, [3, 1, 4], 3) == [(1, 1, 0), (1, 0, 0), (0, 0, 1)]
    assert tuple_expansion(2, [0, 0], 0) == []
    assert tuple_expansion(3, [4], 2) == [(1,), (1,)]
    with pytest.raises(ArithError):
        tuple_expansion(2, [4], 2)


def test_digit_at_examples():
    assert digit_at(2, 13, 4) == 1
    assert digit_at(2, 12, 2) == 0
    assert digit_at(5, 0, 125) == 0
    with pytest.raises(ArithError):
        digit_at(2, 13, 3)


@pytest.mark.parametrize("k", [2, 3])
def test_digits_match_expansion(k):
    L = 5
    for x in range(k**L):
        e = expansion(k, x, L)
        assert [digit_at(k, x, k**i) for i in range(L)] == e


def test_restrict_examples():
    assert restrict(2, 13, 4) == 1
    assert restrict(3, 25, 9) == 7
    assert restrict(7, 12345, 1) == 0
    with pytest.raises(ArithError):
        restrict(2, 5, 6)


@pytest.mark.parametrize("k", [2, 3])
def test_restrict_is_low_digit_sum(k):
    for x in range(0, k**6, 7):
        for d in powers_upto(k, k**6):
            low = sum(digit_at(k, x, p) * p for p in powers_upto(k, d) if p < d)
            assert restrict(k, x, d) == low == x % d


def test_g_examples():
    assert g(2, [0, 0]) == 1
    assert g(2, [5]) == 8
    assert g(3, [9, 2]) == 27
    with pytest.raises(ArithError):
        g(2, [])


@pytest.mark.parametrize("k", [2, 3])
def test_g_bounds(k):
    for x in range(k**6):
        for y in (0, x // 2, k**6 - 1 - x):
            v = g(k, [x, y])
            assert is_power(k, v) and v > max(x, y)
            assert v // k <= max(x, y, 1)


def test_powers_upto():
    assert powers_upto(2, 16) == [1, 2, 4, 8, 16]
    assert powers_upto(3, 0) == []
