"""Abstract syntax, surface grammar, printer and normal forms for L_BA formulas.

Surface grammar (ASCII, whitespace insensitive)::

    formula := quant | impl
    quant   := ("E" | "A") ident ("<=" term)? "." formula
    impl    := disj ("->" impl)?
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | "(" formula ")" | atom | quant
    atom    := term ("=" | "<=" | "<") term
    term    := factor ("+" factor)*
    factor  := nat "*" factor | "S" "(" term ")" | "V" "(" term ")"
             | "0" | nat | ident | "(" term ")"

A quantifier in operand position extends as far right as possible.
Identifiers are ``[a-z][a-zA-Z0-9]*``; names starting with ``_`` are reserved
for generated variables and only accepted with ``allow_reserved=True``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Union

# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Succ:
    arg: "Term"


@dataclass(frozen=True)
class Plus:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Vk:
    arg: "Term"


@dataclass(frozen=True)
class Lit:
    """The numeral S^n(0)."""

    value: int


@dataclass(frozen=True)
class Scalar:
    """n-fold addition of a term."""

    n: int
    arg: "Term"


Term = Union[Zero, Var, Succ, Plus, Vk, Lit, Scalar]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Le:
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class BoundedExists:
    """``E var <= bound. body``.

    ``hint`` optionally carries a certified witness generator (see
    :mod:`buchi.oracle`); it never takes part in equality or printing.
    """

    var: str
    bound: Term
    body: "Formula"
    hint: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BoundedForall:
    var: str
    bound: Term
    body: "Formula"


Formula = Union[Eq, Le, Lt, Not, And, Or, Implies, Exists, Forall, BoundedExists, BoundedForall]
ATOMS = (Eq, Le, Lt)
BINARY = (And, Or, Implies)
QUANTIFIERS = (Exists, Forall, BoundedExists, BoundedForall)
BOUNDED = (BoundedExists, BoundedForall)

TRUE: Formula = Eq(Zero(), Zero())
FALSE: Formula = Not(Eq(Zero(), Zero()))

VarContext = tuple

RESERVED_PREFIX = "_"


class SyntaxError_(ValueError):
    """Malformed formula text or AST."""

    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(msg + where)


ParseError = SyntaxError_


def conj(parts: list[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is TRUE."""
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: list[Formula]) -> Formula:
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def as_term(t: Term | str | int) -> Term:
    if isinstance(t, str):
        return Var(t)
    if isinstance(t, int):
        return Zero() if t == 0 else Lit(t)
    return t


# --------------------------------------------------------------------------
# traversal helpers


def term_vars(t: Term) -> Iterator[str]:
    """Variables of a term in left-to-right occurrence order."""
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, (Succ, Vk, Scalar)):
        yield from term_vars(t.arg)
    elif isinstance(t, Plus):
        yield from term_vars(t.left)
        yield from term_vars(t.right)


def _free_occurrences(phi: Formula, bound: frozenset) -> Iterator[str]:
    if isinstance(phi, ATOMS):
        for v in itertools.chain(term_vars(phi.left), term_vars(phi.right)):
            if v not in bound:
                yield v
    elif isinstance(phi, Not):
        yield from _free_occurrences(phi.arg, bound)
    elif isinstance(phi, BINARY):
        yield from _free_occurrences(phi.left, bound)
        yield from _free_occurrences(phi.right, bound)
    elif isinstance(phi, BOUNDED):
        for v in term_vars(phi.bound):
            if v not in bound:
                yield v
        yield from _free_occurrences(phi.body, bound | {phi.var})
    elif isinstance(phi, (Exists, Forall)):
        yield from _free_occurrences(phi.body, bound | {phi.var})
    else:
        raise TypeError(f"not a formula: {phi!r}")


def free_vars(phi: Formula) -> VarContext:
    """Free variables in order of first free occurrence."""
    seen: dict[str, None] = {}
    for v in _free_occurrences(phi, frozenset()):
        seen.setdefault(v)
    return tuple(seen)


def all_vars(phi: Formula) -> set[str]:
    out: set[str] = set()

    def walk(f: Formula) -> None:
        if isinstance(f, ATOMS):
            out.update(term_vars(f.left))
            out.update(term_vars(f.right))
        elif isinstance(f, Not):
            walk(f.arg)
        elif isinstance(f, BINARY):
            walk(f.left)
            walk(f.right)
        else:
            out.add(f.var)
            if isinstance(f, BOUNDED):
                out.update(term_vars(f.bound))
            walk(f.body)

    walk(phi)
    return out


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, Not):
        yield from subformulas(phi.arg)
    elif isinstance(phi, BINARY):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, QUANTIFIERS):
        yield from subformulas(phi.body)


def check_bounds(phi: Formula) -> None:
    """Raise if a bounded quantifier's variable occurs in its own bound."""
    for f in subformulas(phi):
        if isinstance(f, BOUNDED) and f.var in set(term_vars(f.bound)):
            raise SyntaxError_(f"bound variable {f.var!r} occurs in its own bound")


# --------------------------------------------------------------------------
# substitution


def subst_term(t: Term, name: str, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.name == name else t
    if isinstance(t, Succ):
        return Succ(subst_term(t.arg, name, repl))
    if isinstance(t, Vk):
        return Vk(subst_term(t.arg, name, repl))
    if isinstance(t, Scalar):
        return Scalar(t.n, subst_term(t.arg, name, repl))
    if isinstance(t, Plus):
        return Plus(subst_term(t.left, name, repl), subst_term(t.right, name, repl))
    return t


def substitute(phi: Formula, name: str, repl: Term | str) -> Formula:
    """Replace free occurrences of ``name``; refuses to capture variables."""
    repl = as_term(repl)
    repl_vars = set(term_vars(repl))

    def go(f: Formula) -> Formula:
        # untouched subtrees are kept as they are, hints included; rebuilt
        # bounded existentials lose their hint since it may refer to name
        if name not in free_vars(f):
            return f
        if isinstance(f, ATOMS):
            return type(f)(subst_term(f.left, name, repl), subst_term(f.right, name, repl))
        if isinstance(f, Not):
            return Not(go(f.arg))
        if isinstance(f, BINARY):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, BOUNDED):
            bound = subst_term(f.bound, name, repl)
            body = f.body
            if f.var != name:
                if f.var in repl_vars and name in free_vars(f.body):
                    raise SyntaxError_(f"substituting for {name!r} would capture {f.var!r}")
                body = go(f.body)
            return type(f)(f.var, bound, body)
        if f.var == name:
            return f
        if f.var in repl_vars and name in free_vars(f.body):
            raise SyntaxError_(f"substituting for {name!r} would capture {f.var!r}")
        return type(f)(f.var, go(f.body))

    return go(phi)


# --------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<le><=)
  | (?P<nat>[0-9]+)
  | (?P<ident>_?[a-z_][a-zA-Z0-9_]*)
  | (?P<kw>[EASV])
  | (?P<op>[=<.!&|()+*])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, allow_reserved: bool) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SyntaxError_(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            for i, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            col = pos - line_start + 1
            if kind == "ident" and chunk.startswith(RESERVED_PREFIX) and not allow_reserved:
                raise SyntaxError_(f"identifier {chunk!r} uses the reserved prefix '_'", line, col)
            if kind == "ident" and not chunk.startswith(RESERVED_PREFIX) and "_" in chunk:
                raise SyntaxError_(f"invalid identifier {chunk!r}", line, col)
            if kind in ("arrow", "le", "op", "kw"):
                kind = chunk
            toks.append(_Tok(kind, chunk, line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Backtrack(Exception):
    pass


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str) -> SyntaxError_:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return SyntaxError_(f"{msg}, found {found}", t.line, t.col)

    def accept(self, kind: str) -> _Tok | None:
        if self.tok.kind == kind:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, kind: str, what: str | None = None) -> _Tok:
        t = self.accept(kind)
        if t is None:
            raise self.error(f"expected {what or repr(kind)}")
        return t

    # formulas
    def formula(self) -> Formula:
        if self.tok.kind in ("E", "A"):
            return self.quant()
        return self.impl()

    def quant(self) -> Formula:
        q = self.tok
        self.i += 1
        name = self.expect("ident", "a variable name").text
        bound = None
        if self.accept("<="):
            bound = self.term()
            if name in set(term_vars(bound)):
                raise SyntaxError_(f"bound variable {name!r} occurs in its own bound", q.line, q.col)
        self.expect(".", "'.' after quantifier")
        body = self.formula()
        if q.kind == "E":
            return Exists(name, body) if bound is None else BoundedExists(name, bound, body)
        return Forall(name, body) if bound is None else BoundedForall(name, bound, body)

    def impl(self) -> Formula:
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.accept("|"):
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.unary()
        while self.accept("&"):
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        if self.tok.kind in ("E", "A"):
            return self.quant()
        if self.tok.kind == "(":
            save = self.i
            try:
                return self.atom(soft=True)
            except _Backtrack:
                self.i = save
            self.expect("(")
            inner = self.formula()
            self.expect(")", "')'")
            return inner
        return self.atom()

    def atom(self, soft: bool = False) -> Formula:
        try:
            left = self.term()
            rel = self.tok.kind
            if rel not in ("=", "<=", "<"):
                raise self.error("expected '=', '<=' or '<'")
            self.i += 1
            right = self.term()
        except SyntaxError_:
            if soft:
                raise _Backtrack
            raise
        return {"=": Eq, "<=": Le, "<": Lt}[rel](left, right)

    # terms
    def term(self) -> Term:
        out = self.factor()
        while self.accept("+"):
            out = Plus(out, self.factor())
        return out

    def factor(self) -> Term:
        t = self.tok
        if t.kind == "nat":
            self.i += 1
            n = int(t.text)
            if self.accept("*"):
                return Scalar(n, self.factor())
            return Zero() if n == 0 else Lit(n)
        if t.kind in ("S", "V"):
            self.i += 1
            self.expect("(", f"'(' after {t.kind}")
            arg = self.term()
            self.expect(")", "')'")
            return Succ(arg) if t.kind == "S" else Vk(arg)
        if t.kind == "ident":
            self.i += 1
            return Var(t.text)
        if t.kind == "(":
            self.i += 1
            inner = self.term()
            self.expect(")", "')'")
            return inner
        raise self.error("expected a term")


def parse(text: str, allow_reserved: bool = False) -> Formula:
    """Parse surface syntax into a formula AST."""
    p = _Parser(_tokenize(text, allow_reserved))
    phi = p.formula()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    return phi


def parse_term(text: str, allow_reserved: bool = False) -> Term:
    p = _Parser(_tokenize(text, allow_reserved))
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    return t


# --------------------------------------------------------------------------
# printer


def term_text(t: Term) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Lit):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Succ):
        return f"S({term_text(t.arg)})"
    if isinstance(t, Vk):
        return f"V({term_text(t.arg)})"
    if isinstance(t, Scalar):
        inner = term_text(t.arg)
        if isinstance(t.arg, Plus):
            inner = f"({inner})"
        return f"{t.n}*{inner}"
    if isinstance(t, Plus):
        right = term_text(t.right)
        if isinstance(t.right, Plus):
            right = f"({right})"
        return f"{term_text(t.left)} + {right}"
    raise TypeError(f"not a term: {t!r}")


_REL = {Eq: "=", Le: "<=", Lt: "<"}


def to_text(phi: Formula) -> str:
    """Render a formula in the surface grammar; ``parse`` inverts it."""
    if isinstance(phi, ATOMS):
        return f"{term_text(phi.left)} {_REL[type(phi)]} {term_text(phi.right)}"
    if isinstance(phi, QUANTIFIERS):
        q = "E" if isinstance(phi, (Exists, BoundedExists)) else "A"
        bound = f" <= {term_text(phi.bound)}" if isinstance(phi, BOUNDED) else ""
        return f"{q} {phi.var}{bound}. {to_text(phi.body)}"
    if isinstance(phi, Not):
        return "!" + _operand(phi.arg, (Not,) + ATOMS)
    if isinstance(phi, And):
        return f"{_operand(phi.left, (And, Not) + ATOMS)} & {_operand(phi.right, (Not,) + ATOMS)}"
    if isinstance(phi, Or):
        return f"{_operand(phi.left, (Or, And, Not) + ATOMS)} | {_operand(phi.right, (And, Not) + ATOMS)}"
    if isinstance(phi, Implies):
        return f"{_operand(phi.left, (Or, And, Not) + ATOMS)} -> {_operand(phi.right, (Implies, Or, And, Not) + ATOMS)}"
    raise TypeError(f"not a formula: {phi!r}")


def _operand(phi: Formula, bare: tuple) -> str:
    text = to_text(phi)
    return text if isinstance(phi, bare) else f"({text})"


# --------------------------------------------------------------------------
# classification


def is_delta0(phi: Formula) -> bool:
    return all(not isinstance(f, (Exists, Forall)) for f in subformulas(phi))


def is_pi1(phi: Formula) -> bool:
    while isinstance(phi, Forall):
        phi = phi.body
    return is_delta0(phi)


# --------------------------------------------------------------------------
# desugaring


def desugar_term(t: Term) -> Term:
    if isinstance(t, (Zero, Var)):
        return t
    if isinstance(t, Lit):
        out: Term = Zero()
        for _ in range(t.value):
            out = Succ(out)
        return out
    if isinstance(t, Scalar):
        arg = desugar_term(t.arg)
        out = Zero()
        for _ in range(t.n):
            out = Plus(arg, out)
        return out
    if isinstance(t, Succ):
        return Succ(desugar_term(t.arg))
    if isinstance(t, Vk):
        return Vk(desugar_term(t.arg))
    if isinstance(t, Plus):
        return Plus(desugar_term(t.left), desugar_term(t.right))
    raise TypeError(f"not a term: {t!r}")


def _neg(phi: Formula) -> Formula:
    return phi.arg if isinstance(phi, Not) else Not(phi)


def desugar(phi: Formula) -> Formula:
    """Rewrite into zero/S/+/V terms, =/<= atoms and the connectives not, and, exists."""
    if isinstance(phi, Eq):
        return Eq(desugar_term(phi.left), desugar_term(phi.right))
    if isinstance(phi, Le):
        return Le(desugar_term(phi.left), desugar_term(phi.right))
    if isinstance(phi, Lt):
        return Le(Succ(desugar_term(phi.left)), desugar_term(phi.right))
    if isinstance(phi, Not):
        return _neg(desugar(phi.arg))
    if isinstance(phi, And):
        return And(desugar(phi.left), desugar(phi.right))
    if isinstance(phi, Or):
        return Not(And(_neg(desugar(phi.left)), _neg(desugar(phi.right))))
    if isinstance(phi, Implies):
        return Not(And(desugar(phi.left), _neg(desugar(phi.right))))
    if isinstance(phi, Exists):
        return Exists(phi.var, desugar(phi.body))
    if isinstance(phi, Forall):
        return Not(Exists(phi.var, _neg(desugar(phi.body))))
    if isinstance(phi, BoundedExists):
        guard = Le(Var(phi.var), desugar_term(phi.bound))
        return Exists(phi.var, And(guard, desugar(phi.body)))
    if isinstance(phi, BoundedForall):
        guard = Le(Var(phi.var), desugar_term(phi.bound))
        return Not(Exists(phi.var, And(guard, _neg(desugar(phi.body)))))
    raise TypeError(f"not a formula: {phi!r}")


# --------------------------------------------------------------------------
# flattening into simple atoms

FRESH_PREFIX = "_t"


def is_simple_atom(phi: Formula) -> bool:
    """x=y, x=0, S(x)=y, x+y=z, V(x)=y or x<=y with variables only."""
    if isinstance(phi, Le):
        return isinstance(phi.left, Var) and isinstance(phi.right, Var)
    if not isinstance(phi, Eq) or not isinstance(phi.right, (Var, Zero)):
        return False
    left, right = phi.left, phi.right
    if isinstance(right, Zero):
        return isinstance(left, Var)
    if isinstance(left, Var):
        return True
    if isinstance(left, (Succ, Vk)):
        return isinstance(left.arg, Var)
    if isinstance(left, Plus):
        return isinstance(left.left, Var) and isinstance(left.right, Var)
    return False


def flatten(phi: Formula) -> Formula:
    """Replace nested function symbols by fresh existential variables.

    The input must be desugared. Every atom of the output is simple; fresh
    variables are named ``_t1, _t2, ...`` and scoped as tightly as possible.
    """
    counter = itertools.count(1)

    def fresh() -> str:
        return f"{FRESH_PREFIX}{next(counter)}"

    def as_var(t: Term, k: Callable[[str], Formula]) -> Formula:
        if isinstance(t, Var):
            return k(t.name)
        v = fresh()
        return Exists(v, And(define(t, v), k(v)))

    def define(t: Term, target: str) -> Formula:
        # simple-atom conjunction asserting t = target
        if isinstance(t, Var):
            return Eq(t, Var(target))
        if isinstance(t, Zero):
            return Eq(Var(target), Zero())
        if isinstance(t, Succ):
            return as_var(t.arg, lambda a: Eq(Succ(Var(a)), Var(target)))
        if isinstance(t, Vk):
            return as_var(t.arg, lambda a: Eq(Vk(Var(a)), Var(target)))
        if isinstance(t, Plus):
            return as_var(t.left, lambda a: as_var(t.right, lambda b: Eq(Plus(Var(a), Var(b)), Var(target))))
        raise SyntaxError_(f"flatten expects desugared terms, got {t!r}")

    def atom(f: Formula) -> Formula:
        if isinstance(f, Le):
            return as_var(f.left, lambda a: as_var(f.right, lambda b: Le(Var(a), Var(b))))
        left, right = f.left, f.right
        if isinstance(right, Var):
            return define(left, right.name)
        if isinstance(left, Var):
            return define(right, left.name)
        return as_var(left, lambda a: define(right, a))

    def go(f: Formula) -> Formula:
        if isinstance(f, (Eq, Le)):
            return atom(f)
        if isinstance(f, Not):
            return Not(go(f.arg))
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Exists):
            return Exists(f.var, go(f.body))
        raise SyntaxError_(f"flatten expects a desugared formula, got {type(f).__name__}")

    return go(phi)
