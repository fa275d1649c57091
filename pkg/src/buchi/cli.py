"""Command-line front end: ``buchi <command> ...``.

Exit codes: 0 success, 2 parse or usage error, 3 precondition violation,
4 a check suite found a failing case.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import automata as fa
from .arith import ArithError, check_base, log_power, powers_upto
from .base import BASE_AUTOMATA
from .compiler import PreconditionError, compile_formula, count, decide, solve
from .corpus import check_decide_corpus
from .defs import DefinitionError, f_w
from .oracle import Oracle, OracleError
from .syntax import SyntaxError_, free_vars, is_delta0, parse, to_text
from .theory import CheckReport, axiom_suite, closure_check, lemma_suites, prefix_state_check, run_suite

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_CHECK = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _default_base() -> int:
    raw = os.environ.get("BA_BASE")
    if raw is None:
        return 2
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"BA_BASE must be an integer, got {raw!r}") from None


def _formula_text(arg: str) -> str:
    if arg.startswith("@"):
        try:
            return Path(arg[1:]).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return arg


def _formula(arg: str):
    return parse(_formula_text(arg))


def _assignment(text: str | None) -> dict:
    out: dict = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, value = part.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"bad assignment {part!r}; expected name=value")
        try:
            n = int(value)
        except ValueError:
            raise UsageError(f"value of {name.strip()} must be a natural number") from None
        if n < 0:
            raise UsageError(f"value of {name.strip()} must be a natural number")
        out[name.strip()] = n
    return out


def _emit(text: str, out: str | None = None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# commands


def cmd_decide(args, k: int) -> int:
    phi = _formula(args.formula)
    value = decide(phi, k)
    if args.format == "json":
        _emit(_json({"k": k, "formula": to_text(phi), "value": value}))
    else:
        _emit("true\n" if value else "false\n")
    return EXIT_OK


def cmd_solve(args, k: int) -> int:
    phi = _formula(args.formula)
    sols = solve(phi, k, args.limit)
    if args.format == "json":
        _emit(_json({"k": k, "variables": list(free_vars(phi)), "solutions": sols}))
    else:
        _emit("".join(" ".join(f"{v}={n}" for v, n in s.items()) + "\n" for s in sols))
    return EXIT_OK


def cmd_count(args, k: int) -> int:
    phi = _formula(args.formula)
    n = count(phi, k, args.digits)
    if args.format == "json":
        _emit(_json({"k": k, "digits": args.digits, "count": n}))
    else:
        _emit(f"{n}\n")
    return EXIT_OK


def cmd_compile(args, k: int) -> int:
    cf = compile_formula(_formula(args.formula), k, minimize=args.minimize)
    if args.format == "json":
        obj = fa.to_json_obj(cf.dfa)
        obj["context"] = list(cf.context)
        text = json.dumps(obj, separators=(",", ":")) + "\n"
    else:
        text = fa.to_dot(cf.dfa, hide_sink=args.hide_sink)
    _emit(text, args.out)
    return EXIT_OK


def cmd_eval(args, k: int) -> int:
    phi = _formula(args.formula)
    env = _assignment(args.assign)
    missing = [v for v in free_vars(phi) if v not in env]
    if missing:
        raise PreconditionError(f"no value for {', '.join(missing)}")
    if args.search_bound is None and not is_delta0(phi):
        raise PreconditionError("formula has unbounded quantifiers; pass --search-bound")
    value = Oracle(k, search_bound=args.search_bound).eval(phi, env)
    if args.format == "json":
        _emit(_json({"k": k, "assignment": env, "value": value}))
    else:
        _emit("true\n" if value else "false\n")
    return EXIT_OK


def _load_automaton(source: str, k: int) -> fa.Automaton:
    if source in BASE_AUTOMATA:
        return BASE_AUTOMATA[source](k)
    try:
        text = Path(source).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read automaton {source}: {exc.strerror}") from None
    try:
        return fa.from_json(text)
    except fa.AutomatonError as exc:
        raise UsageError(f"{source}: {exc}") from None


def cmd_wformula(args, k: int) -> int:
    a = _load_automaton(args.automaton, k)
    names = [v.strip() for v in args.vars.split(",") if v.strip()] if args.vars else []
    if args.dvar in names:
        raise PreconditionError(f"the power variable {args.dvar} is also a track variable")
    phi = f_w(a, args.state, names, args.dvar)
    if args.format == "json":
        _emit(_json({"k": a.k, "state": args.state, "variables": names, "dvar": args.dvar,
                     "formula": to_text(phi)}))
    else:
        _emit(to_text(phi) + "\n")
    return EXIT_OK


def cmd_check(args, k: int) -> int:
    seed = args.seed
    suite = args.suite
    if suite == "closure":
        length = 5 if args.bound is None else args.bound
        n = 100 if args.random is None else args.random
        report = CheckReport("closure", seed, closure_check(n, seed, length), {"automata": n, "length": length})
    elif suite == "decide-corpus":
        report = CheckReport("decide-corpus", None, check_decide_corpus())
    else:
        bound = k**4 if args.bound is None else args.bound
        n = 100 if args.random is None else args.random
        if bound < k:
            raise PreconditionError(f"bound must be at least the base {k}")
        cases = axiom_suite(k) if suite == "axioms" else lemma_suites(k)
        report = run_suite(cases, bound, n, seed, title=f"{suite} k={k}")
        if suite == "lemmas":
            report.results.extend(prefix_state_check(k, bound, log_power(k, powers_upto(k, bound)[-1])))
    if args.format == "json":
        _emit(report.to_json(args.timing), args.out)
    else:
        _emit(report.to_text(args.timing), args.out)
    return EXIT_OK if report.passed else EXIT_CHECK


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="buchi", description="Decision procedure and semantic checks for Buchi arithmetic.")
    p.add_argument("--base", "-k", type=int, default=None, help="base k >= 2 (default: $BA_BASE or 2)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def formula_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("formula", help="formula text, or @path to read it from a file")
        sp.add_argument("--base", "-k", type=int, default=None, dest="sub_base")
        sp.add_argument("--format", choices=["text", "json"], default="text")
        return sp

    formula_cmd("decide", "decide a sentence")
    sp = formula_cmd("solve", "list the first solutions of a formula")
    sp.add_argument("--limit", type=int, default=10)
    sp = formula_cmd("count", "count solutions with every component below k^digits")
    sp.add_argument("--digits", type=int, required=True)
    sp = sub.add_parser("compile", help="compile a formula to a Dfa")
    sp.add_argument("formula")
    sp.add_argument("--base", "-k", type=int, default=None, dest="sub_base")
    sp.add_argument("--format", choices=["dot", "json"], default="dot")
    sp.add_argument("--out", default=None)
    sp.add_argument("--minimize", action="store_true")
    sp.add_argument("--hide-sink", action="store_true")
    sp = formula_cmd("eval", "evaluate a formula under an assignment")
    sp.add_argument("--assign", default="", help="e.g. x=3,y=5")
    sp.add_argument("--search-bound", type=int, default=None,
                    help="range 0..B for unbounded quantifiers (sound only with a certified bound)")

    sp = sub.add_parser("wformula", help="print the run-encoding formula W_{A,q}")
    sp.add_argument("--automaton", required=True, help="JSON file, or one of " + ", ".join(BASE_AUTOMATA))
    sp.add_argument("--state", type=int, required=True)
    sp.add_argument("--vars", default="")
    sp.add_argument("--dvar", default="d")
    sp.add_argument("--base", "-k", type=int, default=None, dest="sub_base")
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("check", help="run a semantic check suite")
    sp.add_argument("--suite", choices=["axioms", "lemmas", "closure", "decide-corpus"], default="axioms")
    sp.add_argument("--bound", type=int, default=None)
    sp.add_argument("--random", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--timing", action="store_true", help="include timings (output is then not reproducible)")
    sp.add_argument("--base", "-k", type=int, default=None, dest="sub_base")
    sp.add_argument("--format", choices=["text", "json"], default="text")
    sp.add_argument("--out", default=None)
    return p


COMMANDS = {
    "decide": cmd_decide,
    "solve": cmd_solve,
    "count": cmd_count,
    "compile": cmd_compile,
    "eval": cmd_eval,
    "wformula": cmd_wformula,
    "check": cmd_check,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        k = args.sub_base if args.sub_base is not None else args.base
        if k is None:
            k = _default_base()
        check_base(k)
        return COMMANDS[args.command](args, k)
    except UsageError as exc:
        print(f"buchi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SyntaxError_ as exc:
        print(f"buchi: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithError as exc:
        print(f"buchi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, OracleError, DefinitionError) as exc:
        print(f"buchi: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
