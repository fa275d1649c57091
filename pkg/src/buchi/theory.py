"""Semantic checks of the axioms of T_k and the lemmas of the completeness proof.

Every property is a :class:`PropertyCase`: a Delta_0 matrix whose universal
closure should hold in N. :func:`run_suite` evaluates each case with the
oracle on an exhaustive grid plus seeded random large samples and collects a
:class:`CheckReport`. A case may instead carry an ``expected`` function, in
which case the oracle value must equal it (used for W against simulation).

The closure facts about automata and the prefix-state characterizations of
the basic automata are not Delta_0 statements; they have their own checkers
that produce the same per-case results.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Iterable, Sequence

from . import automata as fa
from .arith import is_power, log_power, powers_upto, v_k
from .base import BASE_AUTOMATA, a_le, a_plus, a_succ, a_v, a_zero
from .defs import (
    comp_matrix, exists_lt, f_congk, f_digit, f_g_graph, f_pk, f_restrict, f_w,
    forall_pk_le, g_bound, run_states,
)
from .oracle import Oracle
from .syntax import (
    FALSE, And, BoundedExists, BoundedForall, Eq, Formula, Implies, Le, Lit, Lt, Not, Or,
    Plus, Scalar, Succ, Term, Var, Vk, Zero, conj, disj, free_vars, iff, is_delta0, parse,
)

X, Y, Z, D, E = Var("x"), Var("y"), Var("z"), Var("d"), Var("e")


@dataclass
class PropertyCase:
    name: str
    k: int
    matrix: Formula
    sampled_vars: tuple
    power_vars: tuple = ()
    large_samples: bool = True
    bound_cap: int | None = None
    group: str = ""
    expected: Callable[[dict], bool] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        self.sampled_vars = tuple(self.sampled_vars)
        self.power_vars = tuple(self.power_vars)
        if not is_delta0(self.matrix):
            raise ValueError(f"{self.name}: matrix is not Delta_0")
        missing = set(free_vars(self.matrix)) - set(self.sampled_vars)
        if missing:
            raise ValueError(f"{self.name}: unsampled free variable(s) {sorted(missing)}")
        if not set(self.power_vars) <= set(self.sampled_vars):
            raise ValueError(f"{self.name}: power variables must be sampled")

    def holds(self, assignment: dict, oracle: Oracle | None = None) -> bool:
        ev = oracle if oracle is not None else Oracle(self.k)
        value = ev.eval(self.matrix, assignment)
        if self.expected is None:
            return value
        return value == bool(self.expected(assignment))


@dataclass
class CaseResult:
    name: str
    passed: bool
    checked: int
    counterexample: dict | None = None
    seconds: float = 0.0
    detail: str = ""


@dataclass
class CheckReport:
    title: str
    seed: int | None
    results: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    def add(self, other: "CheckReport") -> None:
        self.results.extend(other.results)

    def to_text(self, timing: bool = False) -> str:
        head = f"suite {self.title}  seed={self.seed}"
        for key in sorted(self.params):
            head += f"  {key}={self.params[key]}"
        lines = [head]
        for r in self.results:
            line = f"{'PASS' if r.passed else 'FAIL'}  {r.name}  checked={r.checked}"
            if timing:
                line += f"  time={r.seconds:.3f}s"
            lines.append(line)
            if r.counterexample is not None:
                cex = ", ".join(f"{k}={v}" for k, v in r.counterexample.items())
                lines.append(f"      counterexample: {cex or '(closed)'}")
            if r.detail and not r.passed:
                lines.append(f"      {r.detail}")
        n_fail = len(self.failures)
        lines.append(f"{len(self.results)} cases, {len(self.results) - n_fail} passed, {n_fail} failed")
        return "\n".join(lines) + "\n"

    def to_json_obj(self, timing: bool = False) -> dict:
        cases = {}
        for r in self.results:
            entry = {
                "status": "pass" if r.passed else "fail",
                "checked": r.checked,
                "counterexample": r.counterexample,
                "seed": self.seed,
            }
            if r.detail:
                entry["detail"] = r.detail
            if timing:
                entry["seconds"] = round(r.seconds, 6)
            cases[r.name] = entry
        return {
            "suite": self.title,
            "seed": self.seed,
            "params": dict(sorted(self.params.items())),
            "passed": self.passed,
            "cases": cases,
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_json_obj(timing), indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# running cases


def _grid(case: PropertyCase, bound: int) -> Iterable[dict]:
    if case.bound_cap is not None:
        bound = min(bound, case.bound_cap)
    k = case.k
    axes = []
    for v in case.sampled_vars:
        if v in case.power_vars:
            axes.append(powers_upto(k, bound))
        else:
            axes.append(range(bound))
    names = case.sampled_vars
    for values in iproduct(*axes):
        yield dict(zip(names, values))


def _random_samples(case: PropertyCase, count: int, seed) -> Iterable[dict]:
    rng = random.Random(f"{seed}:{case.name}")
    k = case.k
    for _ in range(count):
        out = {}
        for v in case.sampled_vars:
            if v in case.power_vars:
                out[v] = k ** rng.randrange(21)
            else:
                out[v] = rng.randrange(k**20)
        yield out


def check_case(case: PropertyCase, bound: int, random_count: int, seed, oracle: Oracle | None = None) -> CaseResult:
    """Evaluate one case; stops at the first counterexample."""
    ev = oracle if oracle is not None else Oracle(case.k)
    start = time.perf_counter()
    fn = ev.compile(case.matrix)
    expected = case.expected
    checked = 0
    samples: Iterable[dict] = _grid(case, bound)
    if case.large_samples and random_count:
        samples = _chain_iter(samples, _random_samples(case, random_count, seed))
    for env in samples:
        checked += 1
        value = fn(env)
        if expected is not None:
            value = value == bool(expected(env))
        if not value:
            return CaseResult(case.name, False, checked, dict(env), time.perf_counter() - start)
    return CaseResult(case.name, True, checked, None, time.perf_counter() - start)


def _chain_iter(*its):
    for it in its:
        yield from it


def run_suite(cases: Sequence[PropertyCase], bound: int, random_count: int = 0, seed=0,
              title: str = "custom") -> CheckReport:
    """Check every case; one oracle per base is shared so common subformulas are reused."""
    report = CheckReport(title, seed, params={"bound": bound, "random": random_count})
    oracles: dict[int, Oracle] = {}
    for case in cases:
        if bound < case.k:
            raise ValueError(f"bound {bound} is below the base {case.k}")
        ev = oracles.setdefault(case.k, Oracle(case.k))
        report.results.append(check_case(case, bound, random_count, seed, ev))
    return report


# --------------------------------------------------------------------------
# sample properties phi(e, ys) shared by (Comp), least element and induction


def comp_samples(k: int) -> list[tuple[str, Callable[[Term], Formula], tuple]]:
    """(label, builder, parameter variables). Builders map a term e to phi(e)."""
    return [
        ("below_y", lambda e: Le(e, Y), ("y",)),
        ("pk_shift", lambda e: f_pk(Plus(Y, e)), ("y",)),
        ("digit_one", lambda e: f_digit(Y, e, 1), ("y",)),
        ("is_vy", lambda e: Eq(Vk(Y), e), ("y",)),
        ("same_digit", lambda e: disj([And(f_digit(Y, e, a), f_digit(Z, e, a)) for a in range(k)]), ("y", "z")),
    ]


def _case(k, group, label, matrix, sampled, powers=(), **kw) -> PropertyCase:
    return PropertyCase(f"k{k}/{group}/{label}", k, matrix, tuple(sampled), tuple(powers), group=group, **kw)


def _p(text: str) -> Formula:
    return parse(text)


# --------------------------------------------------------------------------
# axioms


ADD_AXIOMS = [
    ("add_assoc", "(x + y) + z = x + (y + z)", "xyz"),
    ("add_comm", "x + y = y + x", "xy"),
    ("add_zero", "x + 0 = x", "x"),
    ("add_succ", "x + S(y) = S(x + y)", "xy"),
    ("add_cancel", "x + z = y + z -> x = y", "xyz"),
    ("le_refl", "x <= x", "x"),
    ("le_antisym", "x <= y & y <= x -> x = y", "xy"),
    ("le_trans", "x <= y & y <= z -> x <= z", "xyz"),
    ("le_total", "x <= y | y <= x", "xy"),
    ("le_translate", "x <= y -> x + z <= y + z", "xyz"),
    ("lt_succ", "x < S(x)", "x"),
    ("discrete", "!(x < y & y < S(x))", "xy"),
]


def axiom_suite(k: int) -> list[PropertyCase]:
    g = "axiom"
    cases = [_case(k, g, name, _p(text), tuple(vs)) for name, text, vs in ADD_AXIOMS]
    cases.append(_case(k, g, "Ord0", _p("0 <= x"), "x"))
    cases.append(_case(k, g, "Ord1", _p("(x <= y -> E z <= y. z + x = y) & ((E z <= y. z + x = y) -> x <= y)"), "xy"))
    cases.append(_case(k, g, "Mod", disj([f_congk(X, Lit(a) if a else Zero(), k) for a in range(k)]), "x"))
    cases.append(_case(k, g, "V0", _p("V(0) = 0 & V(1) = 1"), ()))
    cases.append(_case(k, g, "V1a", _p(f"V({k}*x) = {k}*V(x)"), "x"))
    v1b = Implies(f_pk(D), conj([_p(f"V({a}*d) = d") for a in range(1, k)]))
    cases.append(_case(k, g, "V1b", v1b, "d", "d"))
    cases.append(_case(k, g, "V2", _p("(0 < x & 0 < y & V(x) < V(y)) -> V(x + y) = V(x)"), "xy"))
    cases.append(_case(k, g, "V3", Implies(_p("0 < x"), BoundedExists("y", X, disj([
        _p(f"x = y + {a}*V(x) & (V(x) < V(y) | y = 0)") for a in range(1, k)
    ]))), "x"))
    cases.append(_case(k, g, "V4", _p(f"0 < x -> E d <= x. (0 < d & V(d) = d) & d <= x & x < {k}*d"), "x"))
    cases.append(_case(k, g, "V5", _p("V(V(x)) = V(x)"), "x"))
    for label, build, params in comp_samples(k):
        cases.append(_case(k, g, f"Comp_{label}", comp_matrix(build, D), params + ("d",), "d"))
    return cases


def mutation_case(k: int) -> PropertyCase:
    """(V2) with the strict comparison of valuations weakened to <=; false in N."""
    return _case(k, "mutation", "V2_weak", _p("(0 < x & 0 < y & V(x) <= V(y)) -> V(x + y) = V(x)"), "xy")


# --------------------------------------------------------------------------
# coefficient, restriction, least element, induction


def _restrict_hint(x: Term, d: Term):
    def hint(ev, env):
        dv = ev.term_value(d, env)
        if not is_power(ev.k, dv):
            return None
        return [ev.term_value(x, env) % dv]
    return hint


def exists_restrict(x: Term, d: Term, name: str, body: Formula) -> Formula:
    """E name <= x. (x|_d = name & body), with the obvious witness as hint."""
    return BoundedExists(name, x, And(f_restrict(x, d, Var(name)), body), _restrict_hint(x, d))


def with_restrictions(xs: Sequence[Term], d: Term, body_of: Callable[[list], Formula]) -> Formula:
    """Bind the restrictions xs|_d to fresh names and apply body_of to them."""
    names = [f"_r{i}" for i in range(len(xs))]
    body = body_of([Var(n) for n in names])
    for x, n in reversed(list(zip(xs, names))):
        body = exists_restrict(x, d, n, body)
    return body


def coefficient_suite(k: int) -> list[PropertyCase]:
    g = "coefficients"
    pos = Lt(Zero(), X)
    cases = [
        _case(k, g, "i", Implies(pos, f_pk(Vk(X))), "x"),
        _case(k, g, "ii", _p("V(x) <= x"), "x"),
        _case(k, g, "iii", Implies(pos, disj([f_digit(X, Vk(X), a) for a in range(1, k)])), "x"),
        _case(k, g, "iv", Implies(conj([pos, f_pk(D), Lt(D, Vk(X))]), f_digit(X, D, 0)), "xd", "d"),
        _case(k, g, "v", conj([
            Implies(And(pos, f_digit(X, D, a)), Not(f_digit(X, D, b)))
            for a in range(k) for b in range(k) if a != b
        ]), "xd", "d"),
        _case(k, g, "vi", Implies(Not(f_congk(X, Zero(), k)), _p("V(x) = 1")), "x"),
        _case(k, g, "vii", Implies(And(Lt(Lit(1), D), f_pk(D)),
                                   BoundedExists("e", D, And(f_pk(E), Eq(D, Scalar(k, E))))), "d", "d"),
        _case(k, g, "viii", _p("(0 < x & 0 < y & V(x) <= V(y)) -> V(x) <= V(x + y)"), "xy"),
    ]
    return cases


def restriction_suite(k: int) -> list[PropertyCase]:
    g = "restriction"
    pk_d = f_pk(D)
    cases = [
        _case(k, g, "i", Implies(And(pk_d, f_pk(E)), Or(Le(E, D), Le(Scalar(k, D), E))), "de", "de"),
        _case(k, g, "ii", Implies(pk_d, BoundedExists("y", X, f_restrict(X, D, Y), _restrict_hint(X, D))), "xd", "d"),
        _case(k, g, "iii", Implies(And(f_restrict(X, D, Y), f_restrict(X, D, Z)), Eq(Y, Z)), "xyzd", "d"),
        _case(k, g, "iv", Implies(And(pk_d, Lt(X, D)), f_restrict(X, D, X)), "xd", "d"),
        _case(k, g, "v", Implies(conj([pk_d, f_pk(E), Lt(E, D)]), disj([
            And(f_digit(X, E, a), exists_restrict(X, D, "y", f_digit(Y, E, a))) for a in range(k)
        ])), "xde", "de"),
    ]
    return cases


def least_element_suite(k: int) -> list[PropertyCase]:
    g = "least"
    cases = []
    for label, build, params in comp_samples(k):
        d0, d1 = Var("_l0"), Var("_l1")
        minimal = BoundedExists("_l0", D, conj([
            f_pk(d0), build(d0),
            BoundedForall("_l1", d0, Implies(And(Lt(d1, d0), f_pk(d1)), Not(build(d1)))),
        ]))
        cases.append(_case(k, g, label, Implies(And(f_pk(D), build(D)), minimal), params + ("d",), "d"))
    return cases


def induction_suite(k: int) -> list[PropertyCase]:
    g = "induction"
    cases = []
    for label, build, params in comp_samples(k):
        d1 = Var("_i1")
        step = BoundedForall("_i1", D, Implies(And(Lt(d1, D), f_pk(d1)), Implies(build(d1), build(Scalar(k, d1)))))
        matrix = Implies(And(build(Lit(1)), step), Implies(f_pk(D), build(D)))
        cases.append(_case(k, g, label, matrix, params + ("d",), "d"))
    return cases


# --------------------------------------------------------------------------
# run encoding: W against simulation, constructions, basic automata, base case


def random_test_automata(k: int) -> dict[str, fa.Automaton]:
    """Three fixed small random automata used wherever W is exercised."""
    return {
        "R1": fa.random_automaton(random.Random(f"R1:{k}"), k, 1, 3, density=0.4),
        "R2": fa.random_automaton(random.Random(f"R2:{k}"), k, 2, 3, density=0.3),
        "R3": fa.random_automaton(random.Random(f"R3:{k}"), k, 1, 3, deterministic=True),
    }


def _xs(arity: int) -> list[str]:
    pool = ["x", "y", "z", "u"]
    if arity > len(pool):
        raise ValueError("too many tracks for the test grid")
    return pool[:arity]


def _cap(k: int) -> int:
    return k**3


def w_correctness_suite(k: int, automata: dict[str, fa.Automaton] | None = None) -> list[PropertyCase]:
    """Oracle value of W_{A,q}(xs, d) equals run simulation, per automaton and state."""
    if automata is None:
        automata = {name: make(k) for name, make in BASE_AUTOMATA.items()}
        automata.update(random_test_automata(k))
    cases = []
    for name, a in automata.items():
        names = _xs(a.arity)
        for q in a.states:
            def expected(env, a=a, q=q, names=names):
                return q in run_states(a, [env[v] for v in names], log_power(a.k, env["d"]))
            cases.append(_case(k, "w", f"{name}/q{q}", f_w(a, q, names, "d"), names + ["d"], "d",
                               large_samples=False, bound_cap=_cap(k), expected=expected))
    return cases


def _w(a, q, names, d="d"):
    return f_w(a, q, names, d)


def constructions_suite(k: int) -> list[PropertyCase]:
    g = "constructions"
    rnd = random_test_automata(k)
    kw = dict(large_samples=False, bound_cap=_cap(k))
    cases = []

    # (i) product: W for a pair state iff both components' W
    z = a_zero(k)
    for label, a, b in [("zero_x_cozero", z, fa.complement(z)), ("R1_x_R3", rnd["R1"], rnd["R3"]),
                        ("le_x_R2", a_le(k), rnd["R2"])]:
        p = fa.product(a, b)
        names = _xs(a.arity)
        index = {pair: i for i, pair in enumerate(p.provenance)}
        parts = []
        for qa in a.states:
            for qb in b.states:
                lhs = _w(p, index[(qa, qb)], names) if (qa, qb) in index else FALSE
                parts.append(iff(lhs, And(_w(a, qa, names), _w(b, qb, names))))
        cases.append(_case(k, g, f"i/{label}", conj(parts), names + ["d"], "d", **kw))

    # (ii) determinization
    for label, a in [("R1", rnd["R1"]), ("le", a_le(k))]:
        det = fa.determinize(a)
        names = _xs(a.arity)
        parts = []
        for q in a.states:
            hs = [h for h, subset in enumerate(det.provenance) if q in subset]
            parts.append(iff(_w(a, q, names), disj([_w(det, h, names) for h in hs]) if hs else FALSE))
        cases.append(_case(k, g, f"ii/{label}", conj(parts), names + ["d"], "d", **kw))

    # (iii) projection: some y < d completes the run; (iii') y may be replaced by y|_d
    for label, a in [("R2", rnd["R2"]), ("succ", a_succ(k)), ("le", a_le(k))]:
        pr = fa.project(a)
        parts, parts2 = [], []
        for q in a.states:
            parts.append(iff(_w(pr, q, ["x"]), exists_lt("y", D, _w(a, q, ["x", "y"]))))
            parts2.append(iff(_w(a, q, ["x", "y"]), exists_restrict(Y, D, "_r0", _w(a, q, ["x", "_r0"]))))
        cases.append(_case(k, g, f"iii/{label}", conj(parts), "xd", "d", **kw))
        cases.append(_case(k, g, f"iii_prime/{label}", conj(parts2), "xyd", "d", **kw))

    # (iv) cylindrification
    for label, a in [("R1", rnd["R1"]), ("zero", z)]:
        c = fa.cylindrify(a, 1)
        parts = [iff(_w(a, q, ["x"]), _w(c, q, ["x", "y"])) for q in a.states]
        cases.append(_case(k, g, f"iv/{label}", conj(parts), "xyd", "d", **kw))

    # (v) a DFA is in exactly one state
    for label, a in [("succ", a_succ(k)), ("le", a_le(k)), ("v", a_v(k)), ("R3", rnd["R3"]),
                     ("det_R1", fa.determinize(rnd["R1"]))]:
        names = _xs(a.arity)
        ws = [_w(a, q, names) for q in a.states]
        exactly_one = disj([conj([ws[q]] + [Not(ws[r]) for r in a.states if r != q]) for q in a.states])
        cases.append(_case(k, g, f"v/{label}", exactly_one, names + ["d"], "d", **kw))
    return cases


def basic_automata_suite(k: int) -> list[PropertyCase]:
    """Characterizations of the states of the basic automata, stated with W."""
    g = "basic"
    kw = dict(large_samples=False, bound_cap=_cap(k))

    def restricted(xs, body_of):
        return with_restrictions([Var(x) for x in xs], D, body_of)

    az, asu, ap, av, al = a_zero(k), a_succ(k), a_plus(k), a_v(k), a_le(k)
    cases = [
        _case(k, g, "i/zero", iff(restricted("x", lambda r: Eq(r[0], Zero())), _w(az, 0, ["x"])), "xd", "d", **kw),
        _case(k, g, "ii/succ", And(
            iff(restricted("xy", lambda r: And(Eq(Succ(r[0]), D), Eq(r[1], Zero()))), _w(asu, 0, ["x", "y"])),
            iff(restricted("xy", lambda r: Eq(Succ(r[0]), r[1])), _w(asu, 1, ["x", "y"])),
        ), "xyd", "d", **kw),
        _case(k, g, "iii/plus", And(
            iff(restricted("xyz", lambda r: Eq(Plus(r[0], r[1]), r[2])), _w(ap, 0, ["x", "y", "z"])),
            iff(restricted("xyz", lambda r: Eq(Plus(r[0], r[1]), Plus(r[2], D))), _w(ap, 1, ["x", "y", "z"])),
        ), "xyzd", "d", **kw),
        _case(k, g, "iv/v", And(
            iff(restricted("xy", lambda r: And(Eq(r[0], Zero()), Eq(r[1], Zero()))), _w(av, 0, ["x", "y"])),
            iff(restricted("xy", lambda r: And(Lt(Zero(), r[0]), Eq(Vk(r[0]), r[1]))), _w(av, 1, ["x", "y"])),
        ), "xyd", "d", **kw),
        _case(k, g, "v/le", And(
            iff(restricted("xy", lambda r: Le(r[0], r[1])), _w(al, 0, ["x", "y"])),
            iff(restricted("xy", lambda r: Lt(r[1], r[0])), _w(al, 1, ["x", "y"])),
        ), "xyd", "d", **kw),
    ]
    return cases


def base_case_suite(k: int) -> list[PropertyCase]:
    """Each atomic relation holds iff W at d = g(xs) reaches an accepting state."""
    g = "base_case"
    kw = dict(large_samples=False, bound_cap=_cap(k))
    gd = Var("_gd")

    def at_g(names, body):
        xs = [Var(n) for n in names]
        return BoundedExists("_gd", g_bound(xs, k), And(f_g_graph(xs, gd, k), body))

    def w(a, q, names):
        return f_w(a, q, names, gd)

    az, asu, ap, av, al = a_zero(k), a_succ(k), a_plus(k), a_v(k), a_le(k)
    cases = [
        _case(k, g, "i/zero", iff(_p("x = 0"), at_g("x", w(az, 0, ["x"]))), "x", **kw),
        _case(k, g, "ii/succ", iff(_p("S(x) = y"), at_g("xy", w(asu, 1, ["x", "y"]))), "xy", **kw),
        _case(k, g, "iii/plus", iff(_p("x + y = z"), at_g("xyz", w(ap, 0, ["x", "y", "z"]))), "xyz", **kw),
        _case(k, g, "iv/v", iff(_p("V(x) = y"), at_g("xy", Or(w(av, 0, ["x", "y"]), w(av, 1, ["x", "y"])))), "xy", **kw),
        _case(k, g, "v/le", iff(_p("x <= y"), at_g("xy", w(al, 0, ["x", "y"]))), "xy", **kw),
    ]
    return cases


def bounded_lemma_suites(k: int) -> list[PropertyCase]:
    """Coefficient, restriction, least element and induction suites: cheap, checked at full bound."""
    return coefficient_suite(k) + restriction_suite(k) + least_element_suite(k) + induction_suite(k)


def w_suites(k: int) -> list[PropertyCase]:
    """Everything built from W; these use the capped grid."""
    return w_correctness_suite(k) + constructions_suite(k) + basic_automata_suite(k) + base_case_suite(k)


def lemma_suites(k: int) -> list[PropertyCase]:
    return bounded_lemma_suites(k) + w_suites(k)


# --------------------------------------------------------------------------
# prefix states of the basic automata, checked on runs


def prefix_characterizations(k: int) -> dict[str, tuple]:
    """name -> (automaton, {state: predicate(restrictions, d)}); unlisted states are sinks."""
    return {
        "zero": (a_zero(k), {0: lambda r, d: r[0] == 0}),
        "succ": (a_succ(k), {
            0: lambda r, d: r[0] == d - 1 and r[1] == 0,
            1: lambda r, d: r[0] + 1 == r[1],
        }),
        "plus": (a_plus(k), {
            0: lambda r, d: r[0] + r[1] == r[2],
            1: lambda r, d: r[0] + r[1] == r[2] + d,
        }),
        "v": (a_v(k), {
            0: lambda r, d: r[0] == 0 and r[1] == 0,
            1: lambda r, d: r[0] > 0 and v_k(k, r[0]) == r[1],
        }),
        "le": (a_le(k), {
            0: lambda r, d: r[0] <= r[1],
            1: lambda r, d: r[0] > r[1],
        }),
        "eq": (BASE_AUTOMATA["eq"](k), {0: lambda r, d: r[0] == r[1]}),
    }


def prefix_state_check(k: int, bound: int | None = None, max_j: int = 4) -> list[CaseResult]:
    """After j letters a run is in state q iff its characterization holds at d = k^j."""
    if bound is None:
        bound = k**4
    out = []
    for name, (a, chars) in prefix_characterizations(k).items():
        start = time.perf_counter()
        table = a.table
        checked, cex, detail = 0, None, ""
        for xs in iproduct(range(bound), repeat=a.arity):
            q = a.initial
            for j in range(max_j + 1):
                d = k**j
                r = [x % d for x in xs]
                holding = [s for s, pred in chars.items() if pred(r, d)]
                want = holding[0] if len(holding) == 1 else None
                ok = q == want if want is not None else (not holding and q not in chars)
                checked += 1
                if not ok:
                    cex = {**dict(zip(_xs(a.arity), xs)), "d": d}
                    detail = f"run is in state {q}, characterizations hold for {holding}"
                    break
                idx = 0
                for t in reversed(range(a.arity)):
                    idx = idx * k + (xs[t] // d) % k
                q = table[q][idx]
            if cex:
                break
        out.append(CaseResult(f"k{k}/prefix/{name}", cex is None, checked, cex,
                              time.perf_counter() - start, detail))
    return out


# --------------------------------------------------------------------------
# closure facts for automata


def all_words(k: int, m: int, max_len: int) -> list[tuple]:
    letters = [fa.letter_digits(k, m, i) for i in range(k**m)]
    out = [()]
    frontier = [()]
    for _ in range(max_len):
        frontier = [w + (c,) for w in frontier for c in letters]
        out.extend(frontier)
    return out


def reference_accepts(a: fa.Automaton, word: Sequence[tuple]) -> bool:
    """Depth-first search for an accepting path, one transition at a time."""
    idxs = [fa.letter_index(a.k, c) for c in word]
    n = len(idxs)
    stack = [(a.initial, 0)]
    seen = set()
    while stack:
        q, i = stack.pop()
        if i == n:
            if q in a.accepting:
                return True
            continue
        for p in a.delta[q][idxs[i]]:
            if (p, i + 1) not in seen:
                seen.add((p, i + 1))
                stack.append((p, i + 1))
    return False


def reference_language(a: fa.Automaton, max_len: int) -> set:
    """Accepted words up to max_len, by explicit forward simulation over all words."""
    letters = [(fa.letter_digits(a.k, a.arity, i), i) for i in range(a.nletters)]
    out = set()
    level = [((), frozenset([a.initial]))]
    for length in range(max_len + 1):
        for w, cur in level:
            if any(q in a.accepting for q in cur):
                out.add(w)
        if length == max_len:
            break
        nxt = []
        for w, cur in level:
            for c, i in letters:
                succ = set()
                for q in cur:
                    succ.update(a.delta[q][i])
                nxt.append((w + (c,), frozenset(succ)))
        level = nxt
    return out


CLOSURE_SHAPES = [(2, 1), (2, 2), (3, 1), (3, 2)]


def closure_check(count: int = 100, seed=0, max_len: int = 5) -> list[CaseResult]:
    """The five closure facts on seeded random automata, by full enumeration."""
    facts = ["product", "projection", "cylindrify", "complement", "determinize"]
    results = []
    words_cache: dict[tuple, list] = {}

    def words(k, m):
        if (k, m) not in words_cache:
            words_cache[(k, m)] = all_words(k, m, max_len)
        return words_cache[(k, m)]

    def lang(a):
        return reference_language(a, max_len)

    for fact in facts:
        rng = random.Random(f"{seed}:closure:{fact}")
        start = time.perf_counter()
        cex, detail = None, ""
        done = 0
        for i in range(count):
            k, m = CLOSURE_SHAPES[i % len(CLOSURE_SHAPES)]
            n = rng.randint(1, 4)
            if fact == "cylindrify":
                m = min(m, 1)
            a = fa.random_automaton(rng, k, m, n, density=0.5,
                                    deterministic=fact == "complement")
            result, want = _closure_case(fact, a, rng, k, m, words(k, m), lang)
            got = set(fa.enumerate_words(result, max_len))
            done += 1
            if got != want:
                cex = {"automaton": i, "k": k, "arity": m, "states": n}
                diff = sorted(got ^ want)[:1]
                detail = f"languages differ, e.g. on {diff[0] if diff else '?'}"
                break
        results.append(CaseResult(f"closure/{fact}", cex is None, done, cex, time.perf_counter() - start, detail))
    return results


def _closure_case(fact, a, rng, k, m, words, reference):
    """(automaton built by the operation, reference language on words)."""
    lang = reference(a)
    if fact == "product":
        b = fa.random_automaton(rng, k, m, rng.randint(1, 4), density=0.5)
        return fa.product(a, b), lang & reference(b)
    if fact == "projection":
        return fa.project(a), {tuple(c[:-1] for c in w) for w in lang}
    if fact == "cylindrify":
        out = set()
        for w in lang:
            for extra in iproduct(range(k), repeat=len(w)):
                out.add(tuple(c + (b,) for c, b in zip(w, extra)))
        return fa.cylindrify(a, 1), out
    if fact == "complement":
        return fa.complement(a), set(words) - lang
    det = fa.determinize(a)
    if not det.is_deterministic():
        return fa.empty_language(k, m), lang | {("not deterministic",)}
    return det, lang


# --------------------------------------------------------------------------
# comprehension helpers


def comp_holds(k: int, d: int, build: Callable[[Term], Formula], ys: dict, oracle: Oracle | None = None) -> bool:
    """The (Comp) matrix for build at d, evaluated with the oracle."""
    ev = oracle if oracle is not None else Oracle(k)
    return ev.eval(comp_matrix(build, D), {**ys, "d": d})
