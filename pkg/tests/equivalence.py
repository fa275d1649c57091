"""Whole-grid comparison of compiled automata against direct evaluation.

Quantifier-free formulas are evaluated on numpy arrays covering the grid;
formulas with quantifiers go through the scalar oracle point by point.
Automaton membership is computed for the whole grid at once, reading each
tuple up to its own canonical length exactly as ``member`` does.
"""

from __future__ import annotations

import numpy as np

from buchi.compiler import compile_formula
from buchi.oracle import Oracle
from buchi.syntax import (
    And, Eq, Implies, Le, Lit, Lt, Not, Or, Plus, Scalar, Succ, Var, Vk, Zero, free_vars,
)

QF = (Eq, Le, Lt, Not, And, Or, Implies)


def grid_arrays(k: int, names, L: int) -> dict:
    n = k**L
    axes = np.meshgrid(*[np.arange(n, dtype=np.int64)] * len(names), indexing="ij")
    return {v: a.ravel() for v, a in zip(names, axes)}


def is_quantifier_free(phi) -> bool:
    if isinstance(phi, (Eq, Le, Lt)):
        return True
    if isinstance(phi, Not):
        return is_quantifier_free(phi.arg)
    if isinstance(phi, (And, Or, Implies)):
        return is_quantifier_free(phi.left) and is_quantifier_free(phi.right)
    return False


def _vk(k, x):
    out = np.ones_like(x)
    p = k
    top = int(x.max()) if x.size else 0
    while p <= top:
        out = np.where(x % p == 0, p, out)
        p *= k
    return np.where(x == 0, 0, out)


def vec_term(t, env, k, size):
    if isinstance(t, Zero):
        return np.zeros(size, dtype=np.int64)
    if isinstance(t, Lit):
        return np.full(size, t.value, dtype=np.int64)
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Succ):
        return vec_term(t.arg, env, k, size) + 1
    if isinstance(t, Plus):
        return vec_term(t.left, env, k, size) + vec_term(t.right, env, k, size)
    if isinstance(t, Scalar):
        return t.n * vec_term(t.arg, env, k, size)
    if isinstance(t, Vk):
        return _vk(k, vec_term(t.arg, env, k, size))
    raise TypeError(t)


def vec_formula(phi, env, k, size):
    if isinstance(phi, (Eq, Le, Lt)):
        a, b = vec_term(phi.left, env, k, size), vec_term(phi.right, env, k, size)
        return a == b if isinstance(phi, Eq) else (a <= b if isinstance(phi, Le) else a < b)
    if isinstance(phi, Not):
        return ~vec_formula(phi.arg, env, k, size)
    a = vec_formula(phi.left, env, k, size)
    b = vec_formula(phi.right, env, k, size)
    if isinstance(phi, And):
        return a & b
    if isinstance(phi, Or):
        return a | b
    return ~a | b


def dfa_member(dfa, columns, k: int, L: int):
    """member() for every row of the grid at once."""
    size = len(columns[0]) if columns else 1
    table = np.array(dfa.table, dtype=np.int64)
    accepting = np.zeros(dfa.num_states, dtype=bool)
    accepting[list(dfa.accepting)] = True
    canon = np.zeros(size, dtype=np.int64)
    for col in columns:
        length = np.zeros(size, dtype=np.int64)
        rest = col.copy()
        while rest.any():
            length += rest > 0
            rest //= k
        canon = np.maximum(canon, length)
    state = np.full(size, dfa.initial, dtype=np.int64)
    result = accepting[state] & (canon == 0)
    for pos in range(L):
        letter = np.zeros(size, dtype=np.int64)
        for j, col in enumerate(columns):
            letter += ((col // k**pos) % k) * k**j
        state = table[state, letter]
        result = np.where(canon == pos + 1, accepting[state], result)
    return result


def oracle_truth(phi, names, env, k: int, bound_term=None):
    size = len(env[names[0]]) if names else 1
    if is_quantifier_free(phi):
        out = vec_formula(phi, env, k, size)
        return np.broadcast_to(out, (size,)) if np.ndim(out) == 0 else out
    out = np.zeros(size, dtype=bool)
    oracles: dict = {}
    plain = Oracle(k).compile(phi) if bound_term is None else None
    cols = [env[v].tolist() for v in names]
    point: dict = {}
    for i in range(size):
        for v, col in zip(names, cols):
            point[v] = col[i]
        if plain is not None:
            out[i] = plain(point)
        else:
            b = Oracle(k).term_value(bound_term, point)
            fn = oracles.get(b)
            if fn is None:
                fn = oracles[b] = Oracle(k, search_bound=b).compile(phi)
            out[i] = fn(point)
    return out


def compare_entry(entry, k: int, L: int = 5):
    """(number of grid points, list of mismatching assignments, compiled formula)."""
    phi = entry.formula(k)
    cf = compile_formula(phi, k)
    names = list(free_vars(phi))
    env = grid_arrays(k, names, L)
    member = dfa_member(cf.dfa, [env[v] for v in names], k, L)
    truth = oracle_truth(phi, names, env, k, entry.bound_term())
    bad = np.nonzero(member != truth)[0]
    mismatches = [{v: int(env[v][i]) for v in names} for i in bad[:5]]
    return len(member), len(bad), mismatches, cf
