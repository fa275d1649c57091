"""The basic automata for 0, S, +, V_k, <= and = in base k.

States are numbered ``q0 = 0``, ``q1 = 1`` and, where the relation needs one,
the rejecting sink comes last. Track order follows the argument order of the
relation, e.g. a_plus reads (x, y, z) for x + y = z.
"""

from __future__ import annotations

from .arith import check_base
from .automata import Dfa, letter_digits


def _build(k: int, arity: int, n_states: int, step, accepting, sink: int | None) -> Dfa:
    table = []
    for q in range(n_states):
        row = []
        for i in range(k**arity):
            p = step(q, letter_digits(k, arity, i))
            row.append(sink if p is None else p)
        table.append(row)
    return Dfa.from_table(k, arity, table, 0, accepting)


def a_zero(k: int) -> Dfa:
    """x = 0: loop on digit 0, everything else to the sink."""
    check_base(k)
    sink = 1

    def step(q, letter):
        if q == 0 and letter[0] == 0:
            return 0
        return sink

    return _build(k, 1, 2, step, [0], sink)


def a_succ(k: int) -> Dfa:
    """S(x) = y on tracks (x, y)."""
    check_base(k)
    sink = 2

    def step(q, letter):
        a, b = letter
        if q == 0:
            if a == k - 1 and b == 0:
                return 0
            if a <= k - 2 and b == a + 1:
                return 1
        elif q == 1 and a == b:
            return 1
        return None

    return _build(k, 2, 3, step, [1], sink)


def a_plus(k: int) -> Dfa:
    """x + y = z on tracks (x, y, z); q1 means a carry is pending."""
    check_base(k)
    sink = 2

    def step(q, letter):
        a, b, c = letter
        if q == 2:
            return None
        s = a + b + q
        if s < k and c == s:
            return 0
        if s >= k and c == s - k:
            return 1
        return None

    return _build(k, 3, 3, step, [0], sink)


def a_v(k: int) -> Dfa:
    """V_k(x) = y on tracks (x, y)."""
    check_base(k)
    sink = 2

    def step(q, letter):
        a, b = letter
        if q == 0:
            if a == 0 and b == 0:
                return 0
            if a > 0 and b == 1:
                return 1
        elif q == 1 and b == 0:
            return 1
        return None

    return _build(k, 2, 3, step, [0, 1], sink)


def a_le(k: int) -> Dfa:
    """x <= y on tracks (x, y); q1 means the prefix of x exceeds that of y."""
    check_base(k)

    def step(q, letter):
        a, b = letter
        if a == b:
            return q
        return 0 if a < b else 1

    return _build(k, 2, 2, step, [0], None)


def a_eq(k: int) -> Dfa:
    """x = y on tracks (x, y)."""
    check_base(k)
    sink = 1

    def step(q, letter):
        return 0 if q == 0 and letter[0] == letter[1] else sink

    return _build(k, 2, 2, step, [0], sink)


BASE_AUTOMATA = {
    "zero": a_zero,
    "succ": a_succ,
    "plus": a_plus,
    "v": a_v,
    "le": a_le,
    "eq": a_eq,
}
