"""Builders for the defined predicates of BA_k and the run-encoding formula W.

All builders return Delta_0 formulas. Internal bound variables use reserved
names (leading underscore), so user formulas can never capture them; passing
such a name as an argument raises :class:`DefinitionError`.

Some bounded existentials carry a ``hint``: a function of the evaluator and
environment returning a list of values that includes every possible witness
(or None when it cannot tell). The oracle uses hints to avoid blind search.
"""

from __future__ import annotations

from itertools import product as iproduct
from typing import Sequence

from .arith import is_power, log_power
from .automata import Automaton
from .syntax import (
    And, BoundedExists, BoundedForall, Eq, Formula, Implies, Le, Lit, Lt,
    Not, Or, Plus, Scalar, Term, Var, Vk, Zero, as_term, conj, disj, free_vars,
    is_delta0, term_vars,
)


class DefinitionError(ValueError):
    pass


def _names(*terms: Term) -> set[str]:
    out: set[str] = set()
    for t in terms:
        out.update(term_vars(t))
    return out


def _forbid(internal: Sequence[str], *terms: Term) -> None:
    clash = _names(*terms) & set(internal)
    if clash:
        raise DefinitionError(f"argument uses reserved name(s) {sorted(clash)}")


def exists_lt(var: str, bound: Term, body: Formula, hint=None) -> Formula:
    """E var < bound. body, as a bounded existential."""
    return BoundedExists(var, bound, And(Lt(Var(var), bound), body), hint)


def forall_lt(var: str, bound: Term, body: Formula) -> Formula:
    return BoundedForall(var, bound, Implies(Lt(Var(var), bound), body))


def forall_pk_le(var: str, bound: Term, body: Formula) -> Formula:
    """A var <= bound. (P_k(var) -> body)."""
    return BoundedForall(var, bound, Implies(f_pk(Var(var)), body))


def forall_pk_lt(var: str, bound: Term, body: Formula) -> Formula:
    """A var <= bound. ((var < bound & P_k(var)) -> body)."""
    return BoundedForall(var, bound, Implies(And(Lt(Var(var), bound), f_pk(Var(var))), body))


def exists_pk_le(var: str, bound: Term, body: Formula) -> Formula:
    return BoundedExists(var, bound, And(f_pk(Var(var)), body))


# --------------------------------------------------------------------------
# defined predicates


def f_pk(d: Term | str) -> Formula:
    """d is a power of k: 0 < d and V(d) = d."""
    d = as_term(d)
    return And(Lt(Zero(), d), Eq(Vk(d), d))


def f_congk(x: Term | str, y: Term | str, k: int) -> Formula:
    """x and y are congruent modulo k."""
    x, y = as_term(x), as_term(y)
    _forbid(["_cz"], x, y)
    z = Var("_cz")
    return BoundedExists(
        "_cz", Plus(x, y),
        Or(Eq(x, Plus(y, Scalar(k, z))), Eq(y, Plus(x, Scalar(k, z)))),
    )


def _digit_hint(x: Term, d: Term):
    def hint(ev, env):
        dv = ev.term_value(d, env)
        if not is_power(ev.k, dv):
            return None
        return [ev.term_value(x, env) % dv]
    return hint


def f_digit(x: Term | str, d: Term | str, a: int) -> Formula:
    """(x)_d = a: the coefficient of the power d in x is a."""
    x, d = as_term(x), as_term(d)
    _forbid(["_dy", "_dz"], x, d)
    if a < 0:
        raise DefinitionError("digit must be non-negative")
    y, z = Var("_dy"), Var("_dz")
    matrix = And(
        Eq(x, Plus(Plus(y, Scalar(a, d)), z)),
        Or(Eq(z, Zero()), Lt(d, Vk(z))),
    )
    return And(f_pk(d), exists_lt("_dy", d, BoundedExists("_dz", x, matrix), _digit_hint(x, d)))


def f_restrict(x: Term | str, d: Term | str, y: Term | str) -> Formula:
    """x|_d = y: y is x modulo the power d."""
    x, d, y = as_term(x), as_term(d), as_term(y)
    _forbid(["_rz"], x, d, y)
    z = Var("_rz")
    return conj([
        f_pk(d),
        Lt(y, d),
        BoundedExists("_rz", x, And(Eq(x, Plus(y, z)), Or(Eq(z, Zero()), Le(d, Vk(z))))),
    ])


def f_g_graph(xs: Sequence[Term | str], d: Term | str, k: int) -> Formula:
    """g(xs) = d: d is the least power of k above every x_i."""
    xs = [as_term(x) for x in xs]
    d = as_term(d)
    if not xs:
        raise DefinitionError("g needs at least one argument")
    all_zero = And(conj([Eq(x, Zero()) for x in xs]), Eq(d, Lit(1)))
    cases = [
        conj([Le(xj, xi) for xj in xs] + [Lt(xi, d), Le(d, Scalar(k, xi))])
        for xi in xs
    ]
    return Or(all_zero, And(f_pk(d), disj(cases)))


def g_bound(xs: Sequence[Term | str], k: int) -> Term:
    """A term that is always >= g(xs): k * (x_1 + ... + x_n) + 1."""
    xs = [as_term(x) for x in xs]
    total = xs[0]
    for x in xs[1:]:
        total = Plus(total, x)
    return Plus(Scalar(k, total), Lit(1))


# --------------------------------------------------------------------------
# run encoding


def w_var(i: int) -> str:
    return f"_w{i}"


W_DPRIME = "_dp"


def _run_hint(i: int, n: int, q0: int, q1: int, d: Term):
    """Values of w_i compatible with w_0..w_{i-1} encoding a partition of positions.

    Every satisfying tuple has 0/1 digits at positions 0..log d with exactly
    one state active per position, position 0 owned by q0 and position log d
    by q1. This ignores the transition clause entirely.
    """
    cache: dict = {}

    def hint(ev, env):
        k = ev.k
        dv = ev.term_value(d, env)
        key = (k, dv) + tuple(env[w_var(t)] for t in range(i))
        out = cache.get(key)
        if out is None:
            if len(cache) > 100_000:
                cache.clear()
            out = cache[key] = compute(k, dv, env)
        return None if out == "all" else out

    def compute(k, dv, env):
        if not is_power(k, dv):
            return "all"
        j = log_power(k, dv)
        used: set[int] = set()
        for t in range(i):
            w = env[w_var(t)]
            pos = 0
            while w:
                w, r = divmod(w, k)
                if r > 1 or r == 1 and (pos > j or pos in used):
                    return []
                if r == 1:
                    used.add(pos)
                pos += 1
        free = [p for p in range(j + 1) if p not in used]
        forced_in, forced_out = set(), set()
        for p, owner in ((0, q0), (j, q1)):
            if owner < i:
                if (env[w_var(owner)] // k**p) % k != 1:
                    return []
            elif p in used:
                return []
            elif owner == i:
                forced_in.add(p)
            else:
                forced_out.add(p)
        if forced_in & forced_out:
            return []
        if i == n - 1:
            if forced_out & set(free):
                return []
            return [sum(k**p for p in free)]
        optional = [p for p in free if p not in forced_in and p not in forced_out]
        base = sum(k**p for p in forced_in)
        out = []
        for bits in iproduct((0, 1), repeat=len(optional)):
            out.append(base + sum(k**p for p, b in zip(optional, bits) if b))
        out.sort()
        return out
    return hint


def f_w(a: Automaton, q1: int, xs: Sequence[Term | str], d: Term | str) -> Formula:
    """W_{A,q1}(xs, d): A can reach q1 reading the first log_k d letters of xs."""
    xs = [as_term(x) for x in xs]
    d = as_term(d)
    if len(xs) != a.arity:
        raise DefinitionError(f"automaton has arity {a.arity}, got {len(xs)} variables")
    if not 0 <= q1 < a.num_states:
        raise DefinitionError(f"state {q1} out of range")
    n, k, q0 = a.num_states, a.k, a.initial
    internal = [w_var(i) for i in range(n)] + [W_DPRIME, "_dy", "_dz"]
    _forbid(internal, d, *xs)
    ws = [Var(w_var(i)) for i in range(n)]
    dp = Var(W_DPRIME)

    def bit(q: int, pos: Term, val: int) -> Formula:
        return f_digit(ws[q], pos, val)

    unique = forall_pk_le(W_DPRIME, d, disj([
        conj([bit(q, dp, 1)] + [bit(r, dp, 0) for r in range(n) if r != q])
        for q in range(n)
    ]))
    init = bit(q0, Lit(1), 1)
    final = bit(q1, d, 1)
    steps = []
    for q in range(n):
        options = []
        for letter_idx, succ in enumerate(a.delta[q]):
            if not succ:
                continue
            letter = [(letter_idx // k**t) % k for t in range(a.arity)]
            digits = [f_digit(x, dp, ai) for x, ai in zip(xs, letter)]
            for p in succ:
                options.append(conj([bit(p, Scalar(k, dp), 1)] + digits))
        steps.append(Implies(bit(q, dp, 1), disj(options)))
    trans = forall_pk_lt(W_DPRIME, d, conj(steps))
    body: Formula = conj([unique, init, final, trans])
    bound = Scalar(k, d)
    for i in reversed(range(n)):
        body = exists_lt(w_var(i), bound, body, _run_hint(i, n, q0, q1, d))
    return And(f_pk(d), body)


def run_states(a: Automaton, xs: Sequence[int], j: int) -> frozenset:
    """States reachable from the initial state on the first j letters of xs."""
    k = a.k
    cur = frozenset([a.initial])
    for pos in range(j):
        idx = 0
        for t in reversed(range(a.arity)):
            idx = idx * k + (xs[t] // k**pos) % k
        cur = a.step_set(cur, idx)
    return cur


# --------------------------------------------------------------------------
# comprehension


def comp_matrix(phi_at, d: Term | str = "d", x: str = "_cx") -> Formula:
    """The (Comp) instance P_k(d) -> E x < d. A^{P_k} d' < d. ... for a property.

    ``phi_at`` maps a term e to the formula phi(e, ...). Building each
    instance directly, rather than by substitution, keeps the hints inside
    phi attached to the right variables.
    """
    d = as_term(d)
    dprime, probe = "_cd", "_ce"
    at = phi_at(Var(dprime))
    sample = phi_at(Var(probe))
    for f in (at, sample):
        if not is_delta0(f):
            raise DefinitionError("comprehension needs a Delta_0 formula")
    ys = [v for v in free_vars(sample) if v != probe]
    if {x, dprime, probe} & (set(ys) | _names(d)):
        raise DefinitionError("argument uses reserved name(s)")
    choice = Or(
        And(f_digit(Var(x), Var(dprime), 1), at),
        And(f_digit(Var(x), Var(dprime), 0), Not(at)),
    )

    def hint(ev, env):
        dv = ev.term_value(d, env)
        if not is_power(ev.k, dv):
            return None
        return [comp_witness(ev.k, dv, sample, {y: env[y] for y in ys}, probe, oracle=ev)]

    return Implies(f_pk(d), exists_lt(x, d, forall_pk_lt(dprime, d, choice), hint))


def comp_witness(k: int, d: int, phi: Formula, ys: dict, var: str | None = None, oracle=None) -> int:
    """Sum of the powers d' < d at which phi(d', ys) holds."""
    from .oracle import Oracle, OracleError

    if not is_power(k, d):
        raise DefinitionError(f"{d} is not a power of {k}")
    if not is_delta0(phi):
        raise OracleError("formula is not Delta_0")
    if var is None:
        rest = [v for v in free_vars(phi) if v not in ys]
        if len(rest) > 1:
            raise DefinitionError(f"cannot tell which of {rest} is the power variable")
        var = rest[0] if rest else "_unused"
    ev = oracle if oracle is not None else Oracle(k)
    fn = ev.compile(phi)
    total, p = 0, 1
    env = dict(ys)
    while p < d:
        env[var] = p
        if fn(env):
            total += p
        p *= k
    return total
