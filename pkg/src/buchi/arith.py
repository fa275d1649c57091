"""Exact base-k arithmetic on naturals.

Naturals are plain Python ints (arbitrary precision); every function here
rejects negative inputs and bases below 2.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class ArithError(ValueError):
    pass


def check_base(k: int) -> int:
    if not isinstance(k, int) or k < 2:
        raise ArithError(f"base must be an integer >= 2, got {k!r}")
    return k


def _check_nat(x: int, what: str = "value") -> int:
    if not isinstance(x, int) or x < 0:
        raise ArithError(f"{what} must be a natural number, got {x!r}")
    return x


def v_k(k: int, x: int) -> int:
    """Largest power of k dividing x, with V_k(0) = 0."""
    check_base(k)
    _check_nat(x)
    if x == 0:
        return 0
    p = 1
    while x % k == 0:
        x //= k
        p *= k
    return p


def is_power(k: int, d: int) -> bool:
    check_base(k)
    if not isinstance(d, int) or d <= 0:
        return False
    while d % k == 0:
        d //= k
    return d == 1


def log_power(k: int, d: int) -> int:
    """Exponent i with d == k**i; d must be a power of k."""
    if not is_power(k, d):
        raise ArithError(f"{d} is not a power of {k}")
    i = 0
    while d > 1:
        d //= k
        i += 1
    return i


def powers_upto(k: int, bound: int) -> list[int]:
    """All powers of k that are <= bound, ascending."""
    check_base(k)
    out = []
    p = 1
    while p <= bound:
        out.append(p)
        p *= k
    return out


def num_digits(k: int, x: int) -> int:
    """Length of the minimal expansion of x (0 for x = 0)."""
    check_base(k)
    _check_nat(x)
    n = 0
    while x:
        x //= k
        n += 1
    return n


def expansion(k: int, x: int, length: int | None = None) -> list[int]:
    """Least-significant-digit-first expansion of x.

    Without ``length`` the minimal expansion is returned (empty for 0);
    otherwise it is zero-padded to exactly ``length`` digits.
    """
    check_base(k)
    _check_nat(x)
    digits = []
    while x:
        x, r = divmod(x, k)
        digits.append(r)
    if length is not None:
        _check_nat(length, "length")
        if length < len(digits):
            raise ArithError(f"length {length} too small for {len(digits)} digits")
        digits.extend([0] * (length - len(digits)))
    return digits


def from_expansion(k: int, digits: Sequence[int]) -> int:
    check_base(k)
    x = 0
    for d in reversed(digits):
        if not 0 <= d < k:
            raise ArithError(f"digit {d} out of range for base {k}")
        x = x * k + d
    return x


def tuple_expansion(k: int, xs: Sequence[int], length: int) -> list[tuple[int, ...]]:
    """Word over tuple letters whose j-th track is the expansion of xs[j]."""
    tracks = [expansion(k, x, length) for x in xs]
    return [tuple(t[i] for t in tracks) for i in range(length)]


def _check_power(k: int, d: int) -> None:
    if not is_power(k, d):
        raise ArithError(f"{d} is not a power of {k}")


def digit_at(k: int, x: int, d: int) -> int:
    """Coefficient of the power d in the base-k expansion of x."""
    _check_nat(x)
    _check_power(k, d)
    return (x // d) % k


def restrict(k: int, x: int, d: int) -> int:
    """x|_d: the low-order digit block of x below the power d."""
    _check_nat(x)
    _check_power(k, d)
    return x % d


def g(k: int, xs: Iterable[int]) -> int:
    """Least power of k strictly greater than every entry of xs."""
    check_base(k)
    xs = list(xs)
    if not xs:
        raise ArithError("g needs at least one argument")
    m = max(_check_nat(x) for x in xs)
    p = 1
    while p <= m:
        p *= k
    return p
