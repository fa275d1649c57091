"""Fixed formula corpora used by the equivalence tests and the decide check.

COMPILER_CORPUS entries are open formulas with at most three free
variables. When a formula has unbounded quantifiers, ``search_bound`` is a
term over its free variables such that searching every quantified variable
in 0..bound gives the true value in N; ``why`` says why the bound is enough.

DECIDE_CORPUS entries are sentences with their truth value in N. ``basis``
is "trivial" when the value is a textbook fact (the ``why`` field names it)
and "bounded" when it is confirmed by eval_bounded with the stated bound,
which is sound because the sentence is existential and the search finds a
witness below the bound.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .compiler import decide
from .defs import f_congk, f_digit, f_g_graph, f_restrict
from .oracle import eval_bounded
from .syntax import Formula, Lit, Term, Var, parse, parse_term
from .theory import CaseResult


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    build: Callable[[int], Formula]
    search_bound: str | None = None
    why: str = ""
    variables: int = 1

    def formula(self, k: int) -> Formula:
        return self.build(k)

    def bound_term(self) -> Term | None:
        return None if self.search_bound is None else parse_term(self.search_bound)


def _text(text: str) -> Callable[[int], Formula]:
    return lambda k: parse(text.format(k=k))


def _entry(name, build, vars_, bound=None, why=""):
    if isinstance(build, str):
        build = _text(build)
    return CorpusEntry(name, build, bound, why, vars_)


X, Y, Z, D = Var("x"), Var("y"), Var("z"), Var("d")

_WITNESS_X = "every witness is at most x"

COMPILER_CORPUS: list[CorpusEntry] = [
    _entry("zero", "x = 0", 1),
    _entry("succ", "S(x) = y", 2),
    _entry("plus", "x + y = z", 3),
    _entry("double", "x + x = y", 2),
    _entry("carry_scaled", "x + 2*y = z", 3),
    _entry("carry_succ", "S(x) + S(y) = z", 3),
    _entry("carry_power", "x + y = z & V(z) = z", 3),
    _entry("v_graph", "V(x) = y", 2),
    _entry("v_of_sum", "V(x + y) = V(x)", 2),
    _entry("v_scaled", "V({k}*x) = y", 2),
    _entry("le", "x <= y", 2),
    _entry("lt_shift", "x + 3 < y", 2),
    _entry("same_v", "V(x) = V(y) & 0 < x", 2),
    _entry("pk", "0 < x & V(x) = x", 1),
    _entry("not_pk", "!(0 < x & V(x) = x)", 1),
    _entry("pk_sum", "V(x) = x & V(y) = y & x + y = z", 3),
    _entry("v_is_one", "V(x) = 1", 1),
    _entry("even", "E y. y + y = x", 1, "x", "y + y = x forces y <= x"),
    _entry("multiple_k", "E y. x = {k}*y", 1, "x", "x = k*y forces y <= x"),
    _entry("triple", "E y. y + y + y = x", 1, "x", "the witness is at most x"),
    _entry("odd_or_zero", "A y. (y < x -> !(y + y = x))", 1, "x",
           "the body is true whenever y >= x"),
    _entry("two_powers", "E u. E v. u + v = x & V(u) = u & V(v) = v", 1, "x",
           "both summands are at most x"),
    _entry("le_by_sub", "E z. x + z = y", 2, "y", "x + z = y forces z <= y"),
    _entry("power_between", "E z. (0 < z & V(z) = z) & x < z & z <= y", 2, "y",
           "z <= y is a conjunct"),
    _entry("power_window", "E d. (0 < d & V(d) = d) & d <= x & x < {k}*d", 1, "x",
           "d <= x is a conjunct"),
    _entry("all_powers_fit", "A y. (V(y) = y & 0 < y & y <= x) -> E z. z + y = x", 1, "x",
           "the premise fails for y > x and the witness z is at most x"),
    _entry("digit_by_hand",
           "0 < d & V(d) = d & (E y. E z. x = y + d + z & y < d & (z = 0 | d < V(z)))", 2, "x",
           _WITNESS_X),
    _entry("congk", lambda k: f_congk(X, Y, k), 2),
    _entry("digit_one", lambda k: f_digit(X, D, 1), 2),
    _entry("digit_zero", lambda k: f_digit(X, D, 0), 2),
    _entry("digit_top", lambda k: f_digit(X, D, k - 1), 2),
    _entry("restrict", lambda k: f_restrict(X, D, Y), 3),
    _entry("g_graph_1", lambda k: f_g_graph([X], D, k), 2),
    _entry("g_graph_2", lambda k: f_g_graph([X, Y], D, k), 3),
    _entry("cong_one", lambda k: f_congk(X, Lit(1), k), 1),
]


@dataclass(frozen=True)
class Sentence:
    name: str
    k: int
    text: str
    value: bool
    basis: str
    why: str = ""
    bound: int | None = None


DECIDE_CORPUS: list[Sentence] = [
    Sentence("zapryagaev_presburger", 2, "A x. A y. x + S(y) = S(x + y)", True, "trivial",
             "a defining identity of addition, one of the Presburger axioms"),
    Sentence("zapryagaev_v_zero", 2, "A x. (V(x) = 0 -> x = 0) & (x = 0 -> V(x) = 0)", True, "trivial",
             "V_2(x) = 0 exactly for x = 0"),
    Sentence("zapryagaev_odd", 2, "A x. (!(E y. x = y + y)) -> V(x) = 1", True, "trivial",
             "odd numbers have valuation 1"),
    Sentence("zapryagaev_double", 2, "A x. A t. x = t + t -> V(x) = V(t) + V(t)", True, "trivial",
             "V_2(2t) = 2 V_2(t), including t = 0"),
    Sentence("v_below", 2, "A x. V(x) <= x", True, "trivial", "a power dividing x is at most x"),
    Sentence("no_predecessor_of_zero", 2, "E x. S(x) = 0", False, "trivial", "0 is not a successor"),
    Sentence("add_commutes", 2, "A x. A y. A z. (x + y = z -> y + x = z)", True, "trivial",
             "commutativity of addition"),
    Sentence("five_not_even", 2, "E x. x + x = 5", False, "trivial", "5 is odd"),
    Sentence("six_even", 2, "E x. x + x = 6", True, "bounded", "witness x = 3", 6),
    Sentence("parity", 2, "A x. E y. y + y = x | y + y = S(x)", True, "trivial",
             "every number is even or odd"),
    Sentence("order_total", 3, "A x. A y. x <= y | y <= x", True, "trivial", "totality of <="),
    Sentence("no_power_of_two_in_gap", 2, "E x. V(x) = x & 4 < x & x < 8", False, "trivial",
             "there is no power of 2 strictly between 4 and 8"),
    Sentence("power_of_three_in_gap", 3, "E x. V(x) = x & 8 < x & x < 27", True, "bounded",
             "witness x = 9", 27),
    Sentence("v_idempotent", 3, "A x. V(V(x)) = V(x)", True, "trivial", "a power of k is its own valuation"),
    Sentence("power_window", 2, "A x. 0 < x -> E d. V(d) = d & d <= x & x < 2*d", True, "trivial",
             "the leading power of a positive number"),
    Sentence("unbounded", 2, "A x. E y. x < y", True, "trivial", "S(x) > x"),
    Sentence("no_maximum", 2, "E x. A y. y <= x", False, "trivial", "S(x) exceeds x"),
    Sentence("v_of_sum", 2, "A x. A y. (0 < x & V(x) < V(y)) -> V(x + y) = V(x)", True, "trivial",
             "the lower valuation survives addition"),
    Sentence("v_double", 2, "A x. V(x + x) = V(x) + V(x)", True, "trivial", "V_2(2x) = 2 V_2(x)"),
    Sentence("v_scaled_base3", 3, "A x. V(3*x) = 3*V(x)", True, "trivial", "V_3(3x) = 3 V_3(x)"),
    Sentence("cancel_to_zero", 3, "A x. A y. x + y = y -> x = 0", True, "trivial", "cancellation"),
    Sentence("split_three", 2, "E x. E y. x + y = 3 & V(x) = 2 & V(y) = 1", True, "bounded",
             "witness x = 2, y = 1", 3),
    Sentence("odd_or_even_v", 2, "A x. V(x) = 1 | E y. x = y + y", True, "trivial",
             "odd numbers have valuation 1"),
    Sentence("powers_unbounded", 3, "A x. E y. V(y) = y & x < y", True, "trivial",
             "k^(x+1) exceeds x"),
    Sentence("v_not_injective", 2, "A x. A y. V(x) = V(y) -> x = y", False, "trivial",
             "V(1) = V(3) = 1"),
]


def check_decide_corpus(corpus: list[Sentence] | None = None) -> list[CaseResult]:
    """Decide each sentence and compare with its recorded value."""
    out = []
    for s in DECIDE_CORPUS if corpus is None else corpus:
        start = time.perf_counter()
        phi = parse(s.text)
        got = decide(phi, s.k)
        ok, detail = got == s.value, ""
        if not ok:
            detail = f"decided {got}, recorded {s.value}"
        if ok and s.basis == "bounded":
            confirmed = eval_bounded(phi, {}, s.k, s.bound)
            if confirmed != s.value:
                ok, detail = False, f"bounded search gives {confirmed}"
        out.append(CaseResult(f"decide/k{s.k}/{s.name}", ok, 1, None if ok else {},
                              time.perf_counter() - start, detail))
    return out


def corpus_entry(name: str) -> CorpusEntry:
    for e in COMPILER_CORPUS:
        if e.name == name:
            return e
    raise KeyError(name)
