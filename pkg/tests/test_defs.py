from itertools import product as iproduct

import pytest

from buchi.arith import digit_at, g, is_power, powers_upto, restrict
from buchi.automata import Dfa
from buchi.base import BASE_AUTOMATA, a_le, a_plus, a_zero
from buchi.defs import (
    DefinitionError, comp_matrix, comp_witness, f_congk, f_digit, f_g_graph, f_pk, f_restrict,
    f_w, g_bound, run_states,
)
from buchi.oracle import Oracle, eval_delta0
from buchi.syntax import Le, Var, desugar, free_vars, is_delta0, to_text


def test_examples():
    assert eval_delta0(f_pk("d"), {"d": 8}, 2)
    assert not eval_delta0(f_pk("d"), {"d": 0}, 2)
    assert not eval_delta0(f_pk("d"), {"d": 6}, 2)
    assert eval_delta0(f_congk("x", "y", 3), {"x": 5, "y": 8}, 3)
    assert not eval_delta0(f_congk("x", "y", 3), {"x": 5, "y": 9}, 3)
    assert eval_delta0(f_digit("x", "d", 1), {"x": 13, "d": 4}, 2)
    assert eval_delta0(f_restrict("x", "d", "y"), {"x": 13, "d": 4, "y": 1}, 2)
    assert eval_delta0(f_g_graph(["x"], "d", 2), {"x": 0, "d": 1}, 2)
    assert eval_delta0(f_g_graph(["x"], "d", 2), {"x": 5, "d": 8}, 2)


def test_w_examples():
    w = f_w(a_zero(2), 0, ["x"], "d")
    assert eval_delta0(w, {"x": 0, "d": 2}, 2)
    assert not eval_delta0(w, {"x": 1, "d": 2}, 2)
    assert eval_delta0(f_w(a_plus(2), 0, ["x", "y", "z"], "d"), {"x": 3, "y": 1, "z": 4, "d": 8}, 2)


def test_free_variables_and_delta0():
    k = 3
    cases = [
        (f_pk("d"), {"d"}),
        (f_congk("x", "y", k), {"x", "y"}),
        (f_digit("x", "d", 2), {"x", "d"}),
        (f_restrict("x", "d", "y"), {"x", "d", "y"}),
        (f_g_graph(["x", "y"], "d", k), {"x", "y", "d"}),
        (f_w(a_plus(k), 1, ["x", "y", "z"], "d"), {"x", "y", "z", "d"}),
        (comp_matrix(lambda e: Le(e, Var("y"))), {"d", "y"}),
    ]
    for phi, names in cases:
        assert set(free_vars(phi)) == names
        assert is_delta0(phi)
        # desugared bounded quantifiers become guarded ones; the guard keeps the search finite
        plain, sugared = Oracle(k), Oracle(k, search_bound=k**3)
        for vals in iproduct([0, 1, 3, 9], repeat=len(names)):
            env = dict(zip(sorted(names), vals))
            if sum(vals) + 1 > k**3 // (k + 1):
                continue
            assert plain.eval(phi, env) == sugared.eval(desugar(phi), env), (to_text(phi), env)


def test_errors():
    with pytest.raises(DefinitionError):
        f_congk("_cz", "y", 2)
    with pytest.raises(DefinitionError):
        f_digit("x", "_dy", 1)
    with pytest.raises(DefinitionError):
        f_restrict("_rz", "d", "y")
    with pytest.raises(DefinitionError):
        f_g_graph([], "d", 2)
    with pytest.raises(DefinitionError):
        f_w(a_plus(2), 0, ["x", "y"], "d")
    with pytest.raises(DefinitionError):
        f_w(a_le(2), 0, ["x", "_w0"], "d")
    with pytest.raises(DefinitionError):
        f_w(a_le(2), 5, ["x", "y"], "d")
    with pytest.raises(DefinitionError):
        comp_witness(2, 6, Le(Var("e"), Var("y")), {"y": 1})


def _agreement(k, restrict_y=None):
    o = Oracle(k)
    n = k**4
    pk = o.compile(f_pk("d"))
    cong = o.compile(f_congk("x", "y", k))
    digits = [o.compile(f_digit("x", "d", a)) for a in range(k)]
    rst = o.compile(f_restrict("x", "d", "y"))
    for d in range(n):
        assert pk({"d": d}) == is_power(k, d)
    for x, y in iproduct(range(n), repeat=2):
        assert cong({"x": x, "y": y}) == ((x - y) % k == 0)
    for x, d in iproduct(range(n), repeat=2):
        power = is_power(k, d)
        want = digit_at(k, x, d) if power else None
        for a in range(k):
            assert digits[a]({"x": x, "d": d}) == (a == want), (x, d, a)
        ys = range(n) if power or restrict_y is None else restrict_y(x, d)
        want = restrict(k, x, d) if power else None
        for y in ys:
            assert rst({"x": x, "d": d, "y": y}) == (y == want), (x, d, y)


@pytest.mark.parametrize("k", [2, 3])
def test_agreement_exhaustive(k):
    _agreement(k)


def test_agreement_base5():
    # For non-powers d the conjunct P_k(d) is false, so a few y per (x, d) suffice.
    _agreement(5, restrict_y=lambda x, d: {0, x % d if d else 0, x, d, 624})


@pytest.mark.parametrize("k", [2, 3])
def test_g_graph(k):
    o = Oracle(k)
    fn = o.compile(f_g_graph(["x", "y"], "d", k))
    bnd = g_bound(["x", "y"], k)
    for x, y in iproduct(range(k**3), repeat=2):
        want = g(k, [x, y])
        assert want <= o.term_value(bnd, {"x": x, "y": y})
        for d in range(k**4 + 1):
            assert fn({"x": x, "y": y, "d": d}) == (d == want)


def test_comp_witness_examples():
    phi = Le(Var("e"), Var("y"))
    assert comp_witness(2, 8, phi, {"y": 5}) == 7
    assert comp_witness(2, 8, phi, {"y": 0}) == 0
    assert comp_witness(2, 16, f_digit(Var("z"), Var("e"), 1), {"z": 13}) == 13


@pytest.mark.parametrize("k", [2, 3])
def test_comp_witness_satisfies_matrix(k):
    o = Oracle(k)
    builders = [
        lambda e: Le(e, Var("y")),
        lambda e: f_digit(Var("y"), e, 1),
        lambda e: f_restrict(Var("y"), e, Var("y")),
    ]
    from buchi.defs import f_digit as fd
    from buchi.syntax import And, Eq, Lit, Lt

    for build in builders:
        sample = build(Var("e"))
        for d in powers_upto(k, k**4):
            for y in range(k**4):
                w = comp_witness(k, d, sample, {"y": y}, "e")
                assert w < d
                for p in powers_upto(k, d - 1):
                    assert o.eval(fd("w", "p", 1), {"w": w, "p": p}) == o.eval(sample, {"e": p, "y": y})
                matrix = comp_matrix(build)
                assert o.eval(matrix, {"d": d, "y": y})
                # the witness itself passes the body of the existential
                body = matrix.right.body.right
                assert o.eval(body, {"d": d, "y": y, "_cx": w})


def _check_w(a, k, jmax, xbound, oracle):
    for q in range(a.num_states):
        fn = oracle.compile(f_w(a, q, [f"x{i}" for i in range(a.arity)], "d"))
        for xs in iproduct(range(xbound), repeat=a.arity):
            env = {f"x{i}": x for i, x in enumerate(xs)}
            for j in range(jmax + 1):
                env["d"] = k**j
                assert fn(env) == (q in run_states(a, xs, j)), (q, xs, j)


@pytest.mark.parametrize("name", list(BASE_AUTOMATA))
def test_w_correctness_base2(name):
    a = BASE_AUTOMATA[name](2)
    _check_w(a, 2, 3, 8, Oracle(2))


def test_w_determinism_reflection():
    k = 2
    a = a_plus(k)
    fns = [Oracle(k).compile(f_w(a, q, ["x", "y", "z"], "d")) for q in range(a.num_states)]
    assert isinstance(a, Dfa)
    for xs in iproduct(range(8), repeat=3):
        for j in range(4):
            env = dict(zip("xyz", xs), d=2**j)
            assert sum(fn(env) for fn in fns) == 1


def test_w_without_hints():
    # The partition hint only prunes; small cases agree with plain search.
    k = 2
    a = a_zero(k)
    _check_w(a, k, 2, 4, Oracle(k, use_hints=False))


def test_w_not_a_power():
    fn = Oracle(2).compile(f_w(a_zero(2), 0, ["x"], "d"))
    assert not fn({"x": 0, "d": 3}) and not fn({"x": 0, "d": 0})


def test_wformula_text_parses():
    from buchi.syntax import parse

    phi = f_w(a_le(2), 0, ["x", "y"], "d")
    again = parse(to_text(phi), allow_reserved=True)
    for xs in iproduct(range(4), repeat=2):
        env = {"x": xs[0], "y": xs[1], "d": 4}
        assert eval_delta0(again, env, 2) == eval_delta0(phi, env, 2)
