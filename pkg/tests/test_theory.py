import json

import pytest

from buchi.automata import complement
from buchi.base import a_zero
from buchi.corpus import DECIDE_CORPUS, check_decide_corpus
from buchi.defs import comp_witness, f_w
from buchi.oracle import Oracle, eval_delta0
from buchi.syntax import And, Eq, Le, Lit, Var, parse
from buchi.theory import (
    CheckReport, PropertyCase, axiom_suite, bounded_lemma_suites, closure_check, comp_samples,
    constructions_suite, mutation_case, prefix_state_check, run_suite, w_suites,
)


def by_name(cases, suffix):
    (case,) = [c for c in cases if c.name.endswith(suffix)]
    return case


def test_axiom_examples():
    ax2, ax3 = axiom_suite(2), axiom_suite(3)
    assert by_name(ax2, "/V5").holds({"x": 12})
    v4 = by_name(ax2, "/V4")
    assert v4.holds({"x": 5})
    assert by_name(ax3, "/Mod").holds({"x": 7})
    assert len(ax2) == 27 and len([c for c in ax2 if "/Comp_" in c.name]) == 5


def test_lemma_examples():
    cases = bounded_lemma_suites(2)
    assert by_name(cases, "coefficients/ii").holds({"x": 12})
    iv = by_name(cases, "restriction/iv")
    assert iv.holds({v: {"x": 5, "d": 8}.get(v, 0) for v in iv.sampled_vars})
    c = by_name(constructions_suite(2), "constructions/i/zero_x_cozero")
    assert c.holds({v: {"x0": 3, "d": 4}.get(v, 0) for v in c.sampled_vars})


def test_comp_witness_spec_examples():
    e = Var("e")
    assert comp_witness(2, 16, Le(e, Lit(4)), {}, "e") == 7
    assert comp_witness(2, 16, parse("0 = 1"), {}, "e") == 0
    assert comp_witness(3, 27, Eq(e, e), {}, "e") == 13


def test_comp_samples_shape():
    labels = [label for label, _, _ in comp_samples(2)]
    assert labels == ["below_y", "pk_shift", "digit_one", "is_vy", "same_digit"]


def test_axioms_k2():
    report = run_suite(axiom_suite(2), 16, 100, seed=7)
    assert report.passed and len(report.results) == 27
    assert all(r.checked > 100 for r in report.results)


def test_mutation_fails_with_replayable_counterexample():
    case = mutation_case(2)
    report = run_suite([case], 16, 0, 0)
    assert not report.passed
    (r,) = report.failures
    assert r.counterexample == {"x": 1, "y": 1}
    assert case.holds(r.counterexample) is False
    assert "counterexample: x=1, y=1" in report.to_text()


def test_empty_suite():
    report = run_suite([], 16, 5, 0)
    assert report.passed and report.results == []
    assert report.to_text().endswith("0 cases, 0 passed, 0 failed\n")


def test_bound_below_base():
    with pytest.raises(ValueError):
        run_suite(axiom_suite(3), 2, 0, 0)


def test_case_validation():
    with pytest.raises(ValueError):
        PropertyCase("bad", 2, parse("E y. y = x"), ("x",))
    with pytest.raises(ValueError):
        PropertyCase("bad", 2, parse("x = y"), ("x",))
    with pytest.raises(ValueError):
        PropertyCase("bad", 2, parse("x = 0"), ("x",), power_vars=("d",))


def test_power_vars_sampled_over_powers():
    seen = []
    case = PropertyCase("t", 3, parse("d = d"), ("d",), power_vars=("d",),
                        expected=lambda env: seen.append(env["d"]) or True)
    run_suite([case], 30, 10, 1)
    assert seen[:4] == [1, 3, 9, 27]
    assert all(_is_power(3, v) for v in seen) and max(seen) > 30


def _is_power(k, v):
    while v % k == 0:
        v //= k
    return v == 1


def test_random_samples_are_large_and_seeded():
    def record(seed):
        out = []
        case = PropertyCase("r", 2, parse("x = x"), ("x",), expected=lambda env: out.append(env["x"]) or True)
        run_suite([case], 2, 50, seed)
        return out[2:]

    a, b, c = record(3), record(3), record(4)
    assert a == b and a != c
    assert max(a) > 2**16 and max(a) < 2**20


def test_report_formats_deterministic():
    cases = axiom_suite(2)[:5] + [mutation_case(2)]
    r1 = run_suite(cases, 8, 20, seed=42, title="demo")
    r2 = run_suite(cases, 8, 20, seed=42, title="demo")
    assert r1.to_text() == r2.to_text() and r1.to_json() == r2.to_json()
    obj = json.loads(r1.to_json())
    assert obj["seed"] == 42 and obj["passed"] is False
    assert obj["cases"]["k2/mutation/V2_weak"]["counterexample"] == {"x": 1, "y": 1}
    assert obj["cases"]["k2/axiom/add_comm"]["status"] == "pass"
    assert "seconds" in json.loads(r1.to_json(timing=True))["cases"]["k2/axiom/add_comm"]
    assert r1.to_text().splitlines()[0] == "suite demo  seed=42  bound=8  random=20"


def test_bounded_lemmas_k2():
    assert run_suite(bounded_lemma_suites(2), 16, 100, seed=0).passed


def test_w_suites_k2():
    report = run_suite(w_suites(2), 16, 100, seed=0)
    assert report.passed, report.to_text()


def test_w_correctness_cases_detect_a_wrong_expectation():
    a = a_zero(2)
    wrong = PropertyCase("wrong", 2, f_w(a, 0, ["x"], "d"), ("x", "d"), power_vars=("d",),
                         large_samples=False, expected=lambda env: True)
    report = run_suite([wrong], 8, 0, 0)
    assert not report.passed
    cex = report.failures[0].counterexample
    assert not eval_delta0(f_w(a, 0, ["x"], "d"), cex, 2)


def test_prefix_states_k2():
    results = prefix_state_check(2)
    assert results and all(r.passed for r in results)


def test_closure_small():
    results = closure_check(count=10, seed=3, max_len=4)
    assert {r.name.split("/")[1] for r in results} == {
        "product", "projection", "cylindrify", "complement", "determinize"}
    assert all(r.passed for r in results)
    again = closure_check(count=10, seed=3, max_len=4)
    assert [(r.name, r.checked) for r in results] == [(r.name, r.checked) for r in again]


def test_decide_corpus():
    assert len(DECIDE_CORPUS) == 25
    assert all(s.basis in ("trivial", "bounded") for s in DECIDE_CORPUS)
    assert all(s.bound is not None for s in DECIDE_CORPUS if s.basis == "bounded")
    assert sum(s.name.startswith("zapryagaev_") for s in DECIDE_CORPUS) == 4
    results = check_decide_corpus()
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]


def test_decide_corpus_flags_wrong_record():
    from dataclasses import replace

    bad = replace(DECIDE_CORPUS[0], value=False)
    (r,) = check_decide_corpus([bad])
    assert not r.passed and "recorded False" in r.detail
