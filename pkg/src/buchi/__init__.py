"""Automata-based decision procedure and semantic checks for base-k Büchi arithmetic."""

from buchi.arith import digit_at, expansion, from_expansion, g, is_power, restrict, tuple_expansion, v_k
from buchi.automata import Automaton, Dfa
from buchi.compiler import CompiledFormula, compile_formula, count, decide, solve
from buchi.oracle import eval_bounded, eval_delta0
from buchi.syntax import desugar, flatten, free_vars, is_delta0, is_pi1, parse, to_text

__all__ = [
    "Automaton",
    "CompiledFormula",
    "Dfa",
    "compile_formula",
    "count",
    "decide",
    "desugar",
    "digit_at",
    "eval_bounded",
    "eval_delta0",
    "expansion",
    "flatten",
    "free_vars",
    "from_expansion",
    "g",
    "is_delta0",
    "is_pi1",
    "is_power",
    "parse",
    "restrict",
    "solve",
    "to_text",
    "tuple_expansion",
    "v_k",
]
