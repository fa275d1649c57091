"""Compile L_BA formulas to padding-closed Dfas and answer decide/solve/count.

The recursion works on the desugared, flattened formula: simple atoms map to
the basic automata, negation to complement, conjunction to a product over the
union of the operands' contexts, and an existential to projection of the
quantified track followed by determinization and zero saturation.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import automata as fa
from .arith import check_base
from .base import a_eq, a_le, a_plus, a_succ, a_v, a_zero
from .syntax import (
    And, Eq, Exists, Formula, Le, Not, Plus, Succ, Var, Vk, Zero,
    SyntaxError_, desugar, flatten, free_vars, parse,
)


class PreconditionError(ValueError):
    """A well-formed request that violates an operation's precondition."""


@dataclass(frozen=True)
class CompiledFormula:
    dfa: fa.Dfa
    context: tuple
    k: int

    def member(self, values: Mapping[str, int] | Sequence[int]) -> bool:
        if isinstance(values, Mapping):
            missing = [v for v in self.context if v not in values]
            if missing:
                raise PreconditionError(f"no value for {', '.join(missing)}")
            values = [values[v] for v in self.context]
        return self.dfa.member(list(values))

    @property
    def num_states(self) -> int:
        return self.dfa.num_states


def _atom(phi: Formula, k: int) -> tuple[fa.Dfa, list[str]]:
    if isinstance(phi, Le):
        return a_le(k), [phi.left.name, phi.right.name]
    left, right = phi.left, phi.right
    if isinstance(right, Zero):
        return a_zero(k), [left.name]
    if isinstance(left, Var):
        return a_eq(k), [left.name, right.name]
    if isinstance(left, Succ):
        return a_succ(k), [left.arg.name, right.name]
    if isinstance(left, Vk):
        return a_v(k), [left.arg.name, right.name]
    if isinstance(left, Plus):
        return a_plus(k), [left.left.name, left.right.name, right.name]
    raise SyntaxError_(f"not a simple atom: {phi!r}")


def _align(a: fa.Automaton, ctx: Sequence[str], target: Sequence[str]) -> fa.Automaton:
    """Re-express an automaton over ctx as one over target (a superset)."""
    if list(ctx) == list(target):
        return a
    pos = {v: i for i, v in enumerate(target)}
    return fa.remap_tracks(a, [pos[v] for v in ctx], len(target))


class _Compiler:
    def __init__(self, k: int, minimize: bool):
        self.k = k
        self.minimize = minimize
        self.max_states = 0

    def finish(self, a: fa.Automaton) -> fa.Dfa:
        d = fa.minimize(a) if self.minimize else fa.as_dfa(a)
        self.max_states = max(self.max_states, d.num_states)
        return d

    def go(self, phi: Formula) -> tuple[fa.Dfa, tuple]:
        if isinstance(phi, (Eq, Le)):
            base, args = _atom(phi, self.k)
            ctx = tuple(dict.fromkeys(args))
            return self.finish(_align(base, args, ctx)), ctx
        if isinstance(phi, Not):
            a, ctx = self.go(phi.arg)
            return fa.complement(a), ctx
        if isinstance(phi, And):
            a, ca = self.go(phi.left)
            b, cb = self.go(phi.right)
            union = tuple(dict.fromkeys(ca + cb))
            prod = fa.product(_align(a, ca, union), _align(b, cb, union))
            return self.finish(prod), union
        if isinstance(phi, Exists):
            a, ctx = self.go(phi.body)
            if phi.var not in ctx:
                return a, ctx
            rest = tuple(v for v in ctx if v != phi.var)
            moved = _align(a, ctx, rest + (phi.var,))
            det = fa.determinize(fa.project(moved))
            return self.finish(fa.zero_saturate(det)), rest
        raise SyntaxError_(f"unexpected node {type(phi).__name__} after flattening")


def compile_formula(phi: Formula | str, k: int = 2, minimize: bool = False) -> CompiledFormula:
    """Build a Dfa whose k-expansion language is the solution set of phi.

    Tracks follow ``free_vars(phi)``. With ``minimize`` every intermediate
    automaton is reduced; the language is the same either way.
    """
    check_base(k)
    if isinstance(phi, str):
        phi = parse(phi)
    context = free_vars(phi)
    comp = _Compiler(k, minimize)
    dfa, ctx = comp.go(flatten(desugar(phi)))
    dfa = fa.as_dfa(_align(dfa, ctx, context))
    return CompiledFormula(dfa, context, k)


def decide(sentence: Formula | str, k: int = 2) -> bool:
    if isinstance(sentence, str):
        sentence = parse(sentence)
    fv = free_vars(sentence)
    if fv:
        raise PreconditionError(f"not a sentence: free variable(s) {', '.join(fv)}")
    d = compile_formula(sentence, k).dfa
    return d.initial in d.accepting


def count(phi: Formula | str, k: int, L: int) -> int:
    """Number of assignments with every component < k**L that satisfy phi."""
    if L < 0:
        raise PreconditionError("digit count must be non-negative")
    return fa.count_below(compile_formula(phi, k).dfa, L)


# --------------------------------------------------------------------------
# solution enumeration


def _canonical_max_length(d: fa.Dfa) -> int | None:
    """Longest canonical accepted word (last letter non-zero); None if unbounded.

    Returns -1 when no non-empty canonical word exists.
    """
    n = d.num_states
    pre_final = {q for q in range(n) if any(d.table[q][i] in d.accepting for i in range(1, d.nletters))}
    reach = {d.initial}
    stack = [d.initial]
    while stack:
        q = stack.pop()
        for p in d.table[q]:
            if p not in reach:
                reach.add(p)
                stack.append(p)
    preds: list[set[int]] = [set() for _ in range(n)]
    for q in range(n):
        for p in d.table[q]:
            preds[p].add(q)
    coreach = set(pre_final)
    stack = list(pre_final)
    while stack:
        p = stack.pop()
        for q in preds[p]:
            if q not in coreach:
                coreach.add(q)
                stack.append(q)
    useful = reach & coreach
    if d.initial not in useful:
        return -1
    # longest path in the useful subgraph, detecting cycles
    longest: dict[int, int] = {}
    on_stack: set[int] = set()

    def visit(q: int) -> int | None:
        if q in longest:
            return longest[q]
        on_stack.add(q)
        best = 0 if q in pre_final else -1
        for p in set(d.table[q]):
            if p not in useful:
                continue
            if p in on_stack:
                return None
            sub = visit(p)
            if sub is None:
                return None
            if sub >= 0:
                best = max(best, sub + 1)
        on_stack.discard(q)
        longest[q] = best
        return best

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * n + 1000))
    try:
        res = visit(d.initial)
    finally:
        sys.setrecursionlimit(old)
    return None if res is None else res + 1


def _solutions_of_length(d: fa.Dfa, m: int, ell: int):
    """Tuples whose longest component has exactly ell digits, lexicographically."""
    k = d.k
    if ell == 0:
        if d.initial in d.accepting:
            yield (0,) * m
        return
    letters = [fa.letter_digits(k, m, i) for i in range(d.nletters)]
    # fixed[j][i] = digit of track j at position i, or None
    fixed = [[None] * ell for _ in range(m)]

    def feasible() -> bool:
        cur = {d.initial}
        for i in range(ell):
            allowed = [
                idx for idx, c in enumerate(letters)
                if all(fixed[j][i] is None or fixed[j][i] == c[j] for j in range(m))
                and (i < ell - 1 or idx != 0)
            ]
            cur = {d.table[q][idx] for q in cur for idx in allowed}
            if not cur:
                return False
        return bool(cur & d.accepting)

    def dfs(j: int, i: int):
        if j == m:
            yield tuple(sum(fixed[t][p] * k**p for p in range(ell)) for t in range(m))
            return
        nj, ni = (j, i - 1) if i > 0 else (j + 1, ell - 1)
        for a in range(k):
            fixed[j][i] = a
            if feasible():
                yield from dfs(nj, ni)
        fixed[j][i] = None

    if feasible():
        yield from dfs(0, ell - 1)


def solve(phi: Formula | str, k: int = 2, limit: int = 10) -> list[dict]:
    """First ``limit`` solutions by longest-component length, then lexicographically."""
    if limit < 1:
        raise PreconditionError("limit must be at least 1")
    cf = compile_formula(phi, k)
    d, ctx = cf.dfa, cf.context
    m = len(ctx)
    max_len = _canonical_max_length(d)
    out: list[dict] = []
    ell = 0
    while len(out) < limit:
        if max_len is not None and ell > max(max_len, 0):
            break
        for xs in _solutions_of_length(d, m, ell):
            out.append(dict(zip(ctx, xs)))
            if len(out) == limit:
                break
        ell += 1
    return out
