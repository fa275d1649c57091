"""Direct evaluation of formulas over the naturals.

Bounded quantifiers range over ``0..bound`` inclusive. Unbounded ones are only
evaluated by :func:`eval_bounded`, which lets them range over
``0..search_bound``; that is sound only when the caller knows a witness bound.

Formulas are compiled to closures over a mutable environment. Quantifiers do
not always scan their whole range: a static analysis of the body yields, given
the outer values, a set outside of which the body cannot be true (for E) or
cannot be false (for A). Builders may also attach a ``hint`` to a bounded
existential, a function returning the only values that can be witnesses.
Both shortcuts only skip values that cannot change the answer; passing
``use_hints=False`` disables the builder hints for cross-checking.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .arith import check_base, powers_upto
from .syntax import (
    And, BoundedExists, BoundedForall, Eq, Exists, Forall, Formula, Implies, Le, Lit,
    Lt, Not, Or, Plus, Scalar, Succ, Term, Var, Vk, Zero, free_vars, is_delta0, term_vars,
)


class OracleError(ValueError):
    pass


Env = dict
ALL = None  # candidate value meaning "no restriction"


def _vk(k: int, x: int) -> int:
    if x == 0:
        return 0
    p = 1
    while x % k == 0:
        x //= k
        p *= k
    return p


# candidate sets: None (everything), ("iv", lo, hi) with hi None for no upper
# limit, or ("set", sorted tuple)

_EMPTY = ("set", ())


def _inter(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a[0] == "set" and b[0] == "set":
        sb = set(b[1])
        return ("set", tuple(x for x in a[1] if x in sb))
    if a[0] == "set":
        return ("set", tuple(x for x in a[1] if _in(b, x)))
    if b[0] == "set":
        return ("set", tuple(x for x in b[1] if _in(a, x)))
    lo = max(a[1], b[1])
    if a[2] is None:
        hi = b[2]
    elif b[2] is None:
        hi = a[2]
    else:
        hi = min(a[2], b[2])
    if hi is not None and hi < lo:
        return _EMPTY
    return ("iv", lo, hi)


def _in(c, x: int) -> bool:
    if c is None:
        return True
    if c[0] == "set":
        return x in c[1]
    return x >= c[1] and (c[2] is None or x <= c[2])


def _union(a, b):
    if a is None or b is None:
        return None
    if a[0] == "set" and b[0] == "set":
        return ("set", tuple(sorted(set(a[1]) | set(b[1]))))
    if a[0] == "set" and not a[1]:
        return b
    if b[0] == "set" and not b[1]:
        return a
    if a[0] == "iv" and b[0] == "iv":
        lo = min(a[1], b[1])
        hi = None if a[2] is None or b[2] is None else max(a[2], b[2])
        return ("iv", lo, hi)
    # set with interval: widen to the covering interval
    s, iv = (a, b) if a[0] == "set" else (b, a)
    lo = min(iv[1], min(s[1]))
    hi = None if iv[2] is None else max(iv[2], max(s[1]))
    return ("iv", lo, hi)


def _iter(c, bound: int):
    if c is None:
        return range(bound + 1)
    if c[0] == "set":
        return [x for x in c[1] if x <= bound]
    hi = bound if c[2] is None else min(bound, c[2])
    return range(c[1], hi + 1)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class Oracle:
    """Formula compiler for a fixed base and evaluation regime."""

    def __init__(self, k: int, search_bound: int | None = None, use_hints: bool = True,
                 memo_limit: int = 200_000, memo_width: int = 3):
        self.k = check_base(k)
        self.search_bound = search_bound
        self.use_hints = use_hints
        self.memo_limit = memo_limit
        self.memo_width = memo_width
        self._cache: dict[int, tuple] = {}
        self._infos: dict[int, tuple] = {}
        self._shared: dict = {}

    # public -------------------------------------------------------------
    def compile(self, phi: Formula) -> Callable[[Mapping[str, int]], bool]:
        key = id(phi)
        hit = self._cache.get(key)
        if hit is not None and hit[0] is phi:
            return hit[1]
        if self.search_bound is None and not is_delta0(phi):
            raise OracleError("formula has unbounded quantifiers; use eval_bounded")
        needed = free_vars(phi)
        body = self._formula(phi, frozenset(needed))
        self._infos.clear()
        if len(self._shared) > 50_000:
            self._shared.clear()

        def run(assignment: Mapping[str, int]) -> bool:
            env = {}
            for v in needed:
                try:
                    val = assignment[v]
                except KeyError:
                    raise OracleError(f"no value assigned to {v!r}") from None
                if not isinstance(val, int) or val < 0:
                    raise OracleError(f"value of {v!r} must be a natural number")
                env[v] = val
            return bool(body(env))

        if len(self._cache) > 4096:
            self._cache.clear()
        self._cache[key] = (phi, run)
        return run

    def eval(self, phi: Formula, assignment: Mapping[str, int]) -> bool:
        return self.compile(phi)(assignment)

    def term_value(self, t: Term, env: Mapping[str, int]) -> int:
        return self._term(t)(env)

    # terms --------------------------------------------------------------
    def _term(self, t: Term) -> Callable[[Env], int]:
        k = self.k
        if isinstance(t, Zero):
            return lambda env: 0
        if isinstance(t, Lit):
            n = t.value
            return lambda env: n
        if isinstance(t, Var):
            name = t.name
            return lambda env: env[name]
        if isinstance(t, Succ):
            f = self._term(t.arg)
            return lambda env: f(env) + 1
        if isinstance(t, Plus):
            f, g = self._term(t.left), self._term(t.right)
            if isinstance(t.right, Var):
                name = t.right.name
                return lambda env: f(env) + env[name]
            return lambda env: f(env) + g(env)
        if isinstance(t, Scalar):
            n, f = t.n, self._term(t.arg)
            return lambda env: n * f(env)
        if isinstance(t, Vk):
            f = self._term(t.arg)
            return lambda env: _vk(k, f(env))
        raise TypeError(f"not a term: {t!r}")

    # formulas -----------------------------------------------------------
    def _info(self, phi: Formula) -> tuple[tuple, bool]:
        """(free variables, contains a quantifier), cached per node."""
        hit = self._infos.get(id(phi))
        if hit is not None and hit[0] is phi:
            return hit[1], hit[2]
        if isinstance(phi, (Eq, Le, Lt)):
            fv, q = free_vars(phi), False
        elif isinstance(phi, Not):
            fv, q = self._info(phi.arg)
        elif isinstance(phi, (And, Or, Implies)):
            fa_, qa = self._info(phi.left)
            fb, qb = self._info(phi.right)
            fv, q = tuple(dict.fromkeys(fa_ + fb)), qa or qb
        else:
            fb, _ = self._info(phi.body)
            pre = tuple(term_vars(phi.bound)) if isinstance(phi, (BoundedExists, BoundedForall)) else ()
            fv = tuple(dict.fromkeys(pre + tuple(v for v in fb if v != phi.var)))
            q = True
        self._infos[id(phi)] = (phi, fv, q)
        return fv, q

    def _formula(self, phi: Formula, scope: frozenset, parent_fv: tuple | None = None) -> Callable[[Env], bool]:
        fv, has_q = self._info(phi)
        if has_q:
            # structurally equal subformulas share one closure and one memo
            key = (phi, parent_fv is None or self._memo_boundary(phi, parent_fv or ()))
            hit = self._shared.get(key)
            if hit is None:
                hit = self._shared[key] = self._formula_memo(phi, scope, fv, parent_fv)
            return hit
        return self._formula_memo(phi, scope, fv, parent_fv)

    def _formula_memo(self, phi, scope, fv, parent_fv):
        fv, has_q = self._info(phi)
        raw = self._formula_raw(phi, scope, fv)
        if parent_fv is None:
            parent_fv = ()
            if not has_q or self.memo_limit <= 0 or len(fv) > self.memo_width:
                return raw
        elif not self._memo_boundary(phi, parent_fv):
            return raw
        return self._memo(raw, fv)

    def _formula_raw(self, phi: Formula, scope: frozenset, fv: tuple) -> Callable[[Env], bool]:
        if isinstance(phi, (Eq, Le, Lt)):
            f, g = self._term(phi.left), self._term(phi.right)
            if isinstance(phi, Eq):
                return lambda env: f(env) == g(env)
            if isinstance(phi, Le):
                return lambda env: f(env) <= g(env)
            return lambda env: f(env) < g(env)
        if isinstance(phi, Not):
            f = self._formula(phi.arg, scope, fv)
            return lambda env: not f(env)
        if isinstance(phi, (And, Or)):
            parts = [self._formula(c, scope, fv) for c in self._chain(phi, fv)]
            if len(parts) == 2:
                f, g = parts
                if isinstance(phi, And):
                    return lambda env: f(env) and g(env)
                return lambda env: f(env) or g(env)
            if isinstance(phi, And):
                def all_of(env):
                    for f in parts:
                        if not f(env):
                            return False
                    return True
                return all_of

            def any_of(env):
                for f in parts:
                    if f(env):
                        return True
                return False
            return any_of
        if isinstance(phi, Implies):
            f, g = self._formula(phi.left, scope, fv), self._formula(phi.right, scope, fv)
            return lambda env: (not f(env)) or g(env)
        if isinstance(phi, (Exists, Forall, BoundedExists, BoundedForall)):
            return self._quantifier(phi, scope)
        raise TypeError(f"not a formula: {phi!r}")

    def _memo_boundary(self, phi: Formula, parent_fv: tuple) -> bool:
        fv, has_q = self._info(phi)
        return has_q and self.memo_limit > 0 and len(fv) <= self.memo_width and set(fv) != set(parent_fv)

    def _chain(self, phi: Formula, fv: tuple) -> list[Formula]:
        """Operands of a left-nested chain of one connective, stopping at memo boundaries."""
        op = type(phi)
        out = []
        while isinstance(phi, op):
            out.append(phi.right)
            phi = phi.left
            if isinstance(phi, op) and self._memo_boundary(phi, fv):
                # keep a genuine unit (one operand covers the other's variables);
                # a mere prefix of the chain is flattened further
                fl, fr = set(self._info(phi.left)[0]), set(self._info(phi.right)[0])
                if fl <= fr or fr <= fl:
                    break
        out.append(phi)
        out.reverse()
        return out

    def _memo(self, fn: Callable[[Env], bool], keys: tuple) -> Callable[[Env], bool]:
        memo: dict = {}
        limit = self.memo_limit
        if not keys:
            def const(env):
                r = memo.get(None)
                if r is None:
                    r = memo[None] = fn(env)
                return r
            return const
        if len(keys) == 1:
            (a,) = keys

            def memo1(env):
                key = env[a]
                r = memo.get(key)
                if r is None:
                    if len(memo) >= limit:
                        memo.clear()
                    r = memo[key] = fn(env)
                return r
            return memo1
        if len(keys) == 2:
            a, b = keys

            def memo2(env):
                key = (env[a], env[b])
                r = memo.get(key)
                if r is None:
                    if len(memo) >= limit:
                        memo.clear()
                    r = memo[key] = fn(env)
                return r
            return memo2

        def memo_n(env):
            key = tuple([env[n] for n in keys])
            r = memo.get(key)
            if r is None:
                if len(memo) >= limit:
                    memo.clear()
                r = memo[key] = fn(env)
            return r
        return memo_n

    def _quantifier(self, phi, scope: frozenset) -> Callable[[Env], bool]:
        v = phi.var
        existential = isinstance(phi, (Exists, BoundedExists))
        body = self._formula(phi.body, scope | {v})
        if isinstance(phi, (BoundedExists, BoundedForall)):
            bound_fn = self._term(phi.bound)
        else:
            if self.search_bound is None:
                raise OracleError("unbounded quantifier outside eval_bounded")
            sb = self.search_bound
            bound_fn = lambda env: sb
        cand_fn = self._cand(phi.body, v, existential, frozenset())
        hint = phi.hint if isinstance(phi, BoundedExists) and self.use_hints else None
        ev = self

        if existential:
            def search(env):
                bound = bound_fn(env)
                values = None
                if hint is not None:
                    h = hint(ev, env)
                    if h is not None:
                        values = [x for x in h if x <= bound]
                if values is None:
                    values = _iter(cand_fn(env, bound) if cand_fn else None, bound)
                saved = env.get(v, _MISSING)
                try:
                    for x in values:
                        env[v] = x
                        if body(env):
                            return True
                    return False
                finally:
                    if saved is _MISSING:
                        env.pop(v, None)
                    else:
                        env[v] = saved
            return search

        def search_all(env):
            bound = bound_fn(env)
            values = _iter(cand_fn(env, bound) if cand_fn else None, bound)
            saved = env.get(v, _MISSING)
            try:
                for x in values:
                    env[v] = x
                    if not body(env):
                        return False
                return True
            finally:
                if saved is _MISSING:
                    env.pop(v, None)
                else:
                    env[v] = saved
        return search_all

    # candidate analysis ---------------------------------------------------
    def _cand(self, f: Formula, v: str, want: bool, blocked: frozenset):
        # returns a closure or None (meaning ALL always)
        if isinstance(f, Not):
            return self._cand(f.arg, v, not want, blocked)
        if isinstance(f, (And, Or, Implies)):
            if isinstance(f, Implies):
                a = self._cand(f.left, v, not want, blocked)
                b = self._cand(f.right, v, want, blocked)
                meet = not want  # the implication is false iff left true and right false
            else:
                a = self._cand(f.left, v, want, blocked)
                b = self._cand(f.right, v, want, blocked)
                meet = isinstance(f, And) == want
            if meet:
                if a is None:
                    return b
                if b is None:
                    return a
                def meet_fn(env, bound):
                    ca = a(env, bound)
                    if ca is not None and ca[0] == "set" and len(ca[1]) <= 16:
                        return ca  # small already; a superset is always safe
                    return _inter(ca, b(env, bound))
                return meet_fn
            if a is None or b is None:
                return None
            return lambda env, bound: _union(a(env, bound), b(env, bound))
        if isinstance(f, (Exists, Forall, BoundedExists, BoundedForall)):
            if f.var == v:
                return None
            return self._cand(f.body, v, want, blocked | {f.var})
        if isinstance(f, (Eq, Le, Lt)):
            return self._atom_cand(f, v, want, blocked)
        return None

    def _atom_cand(self, f, v: str, want: bool, blocked: frozenset):
        names = set(term_vars(f.left)) | set(term_vars(f.right))
        if names & blocked:
            return None
        k = self.k
        if v not in names:
            # constant in v: decides the whole set at once
            g = self._formula(f, frozenset())
            return lambda env, bound: (None if bool(g(env)) == want else _EMPTY)
        # power pattern V(v) = v on either side
        if isinstance(f, Eq) and want:
            l, r = f.left, f.right
            if (isinstance(l, Vk) and l.arg == Var(v) and r == Var(v)) or (
                isinstance(r, Vk) and r.arg == Var(v) and l == Var(v)
            ):
                return lambda env, bound: ("set", (0,) + tuple(powers_upto(k, bound)))
        if not (_affine(f.left, v) and _affine(f.right, v)):
            return None
        lf, rf = self._term(f.left), self._term(f.right)

        def coeffs(env):
            saved = env.get(v, _MISSING)
            env[v] = 0
            r0 = lf(env) - rf(env)
            env[v] = 1
            r1 = lf(env) - rf(env)
            if saved is _MISSING:
                del env[v]
            else:
                env[v] = saved
            return r1 - r0, r0  # c*v + r

        if isinstance(f, Eq):
            if want:
                def eq_pos(env, bound):
                    c, r = coeffs(env)
                    if c == 0:
                        return None if r == 0 else _EMPTY
                    if (-r) % c == 0 and (-r) // c >= 0:
                        return ("set", ((-r) // c,))
                    return _EMPTY
                return eq_pos

            def eq_neg(env, bound):
                c, r = coeffs(env)
                if c == 0:
                    return _EMPTY if r == 0 else None
                return None
            return eq_neg

        strict = isinstance(f, Lt)

        def ineq(env, bound):
            c, r = coeffs(env)
            # atom true iff c*v + r <= 0 (after shifting a strict inequality);
            # the complement is (-c)*v + (1-r) <= 0
            rr = r + 1 if strict else r
            if want:
                cc = c
            else:
                cc, rr = -c, 1 - rr
            return _linear_le(cc, rr)
        return ineq


_MISSING = object()


def _linear_le(c: int, r: int):
    """Candidates v >= 0 with c*v + r <= 0."""
    if c == 0:
        return None if r <= 0 else _EMPTY
    if c > 0:
        hi = (-r) // c
        return _EMPTY if hi < 0 else ("iv", 0, hi)
    lo = max(0, _ceil_div(r, -c))
    return ("iv", lo, None)


def _affine(t: Term, v: str) -> bool:
    """True when v does not occur under V in t (so t is affine in v)."""
    if isinstance(t, Vk):
        return v not in set(term_vars(t.arg))
    if isinstance(t, (Succ, Scalar)):
        return _affine(t.arg, v)
    if isinstance(t, Plus):
        return _affine(t.left, v) and _affine(t.right, v)
    return True


def eval_delta0(phi: Formula, assignment: Mapping[str, int], k: int, use_hints: bool = True) -> bool:
    """Truth of a bounded formula under an assignment."""
    if not is_delta0(phi):
        raise OracleError("formula is not Delta_0")
    return Oracle(k, use_hints=use_hints).eval(phi, assignment)


def eval_bounded(phi: Formula, assignment: Mapping[str, int], k: int, search_bound: int,
                 use_hints: bool = True) -> bool:
    """Evaluate with unbounded quantifiers restricted to 0..search_bound."""
    if search_bound < 0:
        raise OracleError("search bound must be non-negative")
    return Oracle(k, search_bound=search_bound, use_hints=use_hints).eval(phi, assignment)
