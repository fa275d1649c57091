"""Finite automata over tuples of base-k digits.

A letter of arity m is a tuple of m digits. Internally letters are indexed by
``sum(digit_j * k**j)`` so track 0 is the least significant component; the
all-zero letter has index 0. ``delta[q][i]`` is the sorted tuple of successors
of state ``q`` on letter ``i``.
"""

from __future__ import annotations

import json
import random
from collections import deque
from itertools import product as iproduct
from typing import Iterable, Sequence

from .arith import check_base, num_digits, tuple_expansion


class AutomatonError(ValueError):
    pass


Letter = tuple


def letter_index(k: int, letter: Sequence[int]) -> int:
    idx = 0
    for j in reversed(range(len(letter))):
        a = letter[j]
        if not 0 <= a < k:
            raise AutomatonError(f"digit {a} out of range for base {k}")
        idx = idx * k + a
    return idx


def letter_digits(k: int, m: int, idx: int) -> Letter:
    out = []
    for _ in range(m):
        idx, a = divmod(idx, k)
        out.append(a)
    return tuple(out)


class Automaton:
    """Nondeterministic automaton (Σ_k^m, Q, q0, F, Δ) with states 0..n-1."""

    def __init__(self, k: int, arity: int, delta, initial: int, accepting: Iterable[int], provenance=None):
        check_base(k)
        if arity < 0:
            raise AutomatonError("arity must be non-negative")
        self.k = k
        self.arity = arity
        self.nletters = k**arity
        self.delta = tuple(tuple(tuple(sorted(set(row))) for row in rows) for rows in delta)
        self.initial = initial
        self.accepting = frozenset(accepting)
        self.provenance = provenance
        self._validate()

    def _validate(self) -> None:
        n = len(self.delta)
        if not 0 <= self.initial < n:
            raise AutomatonError("initial state out of range")
        if any(not 0 <= q < n for q in self.accepting):
            raise AutomatonError("accepting state out of range")
        for rows in self.delta:
            if len(rows) != self.nletters:
                raise AutomatonError("transition table does not cover the alphabet")
            for succ in rows:
                if any(not 0 <= p < n for p in succ):
                    raise AutomatonError("transition target out of range")

    @property
    def num_states(self) -> int:
        return len(self.delta)

    @property
    def states(self) -> range:
        return range(len(self.delta))

    def letters(self) -> list[Letter]:
        return [letter_digits(self.k, self.arity, i) for i in range(self.nletters)]

    def transitions(self) -> Iterable[tuple[int, Letter, int]]:
        for q, rows in enumerate(self.delta):
            for i, succ in enumerate(rows):
                if succ:
                    letter = letter_digits(self.k, self.arity, i)
                    for p in succ:
                        yield q, letter, p

    def num_transitions(self) -> int:
        return sum(len(s) for rows in self.delta for s in rows)

    def is_deterministic(self) -> bool:
        return all(len(s) == 1 for rows in self.delta for s in rows)

    def _index_word(self, word: Sequence[Sequence[int]]) -> list[int]:
        out = []
        for letter in word:
            if len(letter) != self.arity:
                raise AutomatonError(f"letter {tuple(letter)} has arity {len(letter)}, expected {self.arity}")
            out.append(letter_index(self.k, letter))
        return out

    def step_set(self, states: Iterable[int], idx: int) -> frozenset:
        out: set[int] = set()
        for q in states:
            out.update(self.delta[q][idx])
        return frozenset(out)

    def reach(self, word: Sequence[Sequence[int]], start: Iterable[int] | None = None) -> frozenset:
        cur = frozenset([self.initial] if start is None else start)
        for idx in self._index_word(word):
            cur = self.step_set(cur, idx)
        return cur

    def accepts(self, word: Sequence[Sequence[int]]) -> bool:
        return bool(self.reach(word) & self.accepting)

    def member(self, xs: Sequence[int]) -> bool:
        if len(xs) != self.arity:
            raise AutomatonError(f"expected {self.arity} numbers, got {len(xs)}")
        length = max((num_digits(self.k, x) for x in xs), default=0)
        return self.accepts(tuple_expansion(self.k, list(xs), length))

    def __repr__(self) -> str:
        kind = type(self).__name__
        return f"<{kind} k={self.k} arity={self.arity} states={self.num_states} accepting={len(self.accepting)}>"

    def same_as(self, other: "Automaton") -> bool:
        """Literal equality of the representation (not language equality)."""
        return (
            self.k == other.k
            and self.arity == other.arity
            and self.initial == other.initial
            and self.accepting == other.accepting
            and self.delta == other.delta
        )


class Dfa(Automaton):
    """Total deterministic automaton: exactly one successor per state and letter."""

    def __init__(self, k, arity, delta, initial, accepting, provenance=None):
        super().__init__(k, arity, delta, initial, accepting, provenance)
        if not self.is_deterministic():
            raise AutomatonError("transition relation is not a total function")
        self.table = tuple(tuple(s[0] for s in rows) for rows in self.delta)

    @classmethod
    def from_table(cls, k, arity, table, initial, accepting, provenance=None) -> "Dfa":
        return cls(k, arity, [[(p,) for p in row] for row in table], initial, accepting, provenance)

    def run(self, q: int, word: Sequence[Sequence[int]]) -> int:
        for idx in self._index_word(word):
            q = self.table[q][idx]
        return q

    def run_indices(self, q: int, idxs: Iterable[int]) -> int:
        t = self.table
        for i in idxs:
            q = t[q][i]
        return q

    def accepts(self, word) -> bool:
        return self.run(self.initial, word) in self.accepting


def is_total(a: Automaton) -> bool:
    return a.is_deterministic()


def as_dfa(a: Automaton) -> Dfa:
    if isinstance(a, Dfa):
        return a
    if not a.is_deterministic():
        raise AutomatonError("automaton is not total deterministic")
    return Dfa(a.k, a.arity, a.delta, a.initial, a.accepting, a.provenance)


def run(a: Dfa, q: int, word) -> int:
    return as_dfa(a).run(q, word)


def accepts(a: Automaton, word) -> bool:
    return a.accepts(word)


def member(a: Automaton, xs: Sequence[int]) -> bool:
    return a.member(xs)


def _wrap(k, arity, delta, initial, accepting, provenance=None) -> Automaton:
    if all(len(s) == 1 for rows in delta for s in rows):
        return Dfa(k, arity, delta, initial, accepting, provenance)
    return Automaton(k, arity, delta, initial, accepting, provenance)


def universal(k: int, arity: int) -> Dfa:
    return Dfa.from_table(k, arity, [[0] * k**arity], 0, [0])


def empty_language(k: int, arity: int) -> Dfa:
    return Dfa.from_table(k, arity, [[0] * k**arity], 0, [])


# --------------------------------------------------------------------------
# closure operations


def product(a: Automaton, b: Automaton) -> Automaton:
    """Intersection over reachable state pairs; provenance[i] = (qa, qb)."""
    if a.k != b.k or a.arity != b.arity:
        raise AutomatonError("product needs the same base and arity")
    start = (a.initial, b.initial)
    ids = {start: 0}
    pairs = [start]
    delta = []
    queue = deque([start])
    while queue:
        qa, qb = queue.popleft()
        rows = []
        for i in range(a.nletters):
            succ = []
            for pa in a.delta[qa][i]:
                for pb in b.delta[qb][i]:
                    pair = (pa, pb)
                    if pair not in ids:
                        ids[pair] = len(pairs)
                        pairs.append(pair)
                        queue.append(pair)
                    succ.append(ids[pair])
            rows.append(succ)
        delta.append(rows)
    accepting = [i for i, (qa, qb) in enumerate(pairs) if qa in a.accepting and qb in b.accepting]
    return _wrap(a.k, a.arity, delta, 0, accepting, tuple(pairs))


def project(a: Automaton) -> Automaton:
    """Erase the last track of every letter."""
    if a.arity == 0:
        raise AutomatonError("cannot project an arity-0 automaton")
    low = a.k ** (a.arity - 1)
    delta = []
    for rows in a.delta:
        new_rows = []
        for i in range(low):
            succ: set[int] = set()
            for b in range(a.k):
                succ.update(rows[i + b * low])
            new_rows.append(succ)
        delta.append(new_rows)
    return Automaton(a.k, a.arity - 1, delta, a.initial, a.accepting)


def remap_tracks(a: Automaton, mapping: Sequence[int], new_arity: int) -> Automaton:
    """Inverse homomorphism: new letter c is read as the old letter (c[mapping[j]])_j."""
    if len(mapping) != a.arity or any(not 0 <= t < new_arity for t in mapping):
        raise AutomatonError("invalid track mapping")
    k = a.k
    old_of_new = []
    for c in range(k**new_arity):
        digits = letter_digits(k, new_arity, c)
        old_of_new.append(letter_index(k, [digits[t] for t in mapping]))
    delta = [[rows[i] for i in old_of_new] for rows in a.delta]
    return _wrap(k, new_arity, delta, a.initial, a.accepting)


def cylindrify(a: Automaton, n: int) -> Automaton:
    """Append n unconstrained tracks."""
    if n < 0:
        raise AutomatonError("n must be non-negative")
    if n == 0:
        return a
    return remap_tracks(a, list(range(a.arity)), a.arity + n)


def reorder_tracks(a: Automaton, perm: Sequence[int]) -> Automaton:
    """Move old track j to position perm[j]."""
    if sorted(perm) != list(range(a.arity)):
        raise AutomatonError(f"{list(perm)} is not a permutation of {a.arity} tracks")
    return remap_tracks(a, perm, a.arity)


def complement(a: Automaton) -> Dfa:
    if not a.is_deterministic():
        raise AutomatonError("complement needs a total deterministic automaton")
    acc = [q for q in a.states if q not in a.accepting]
    return Dfa(a.k, a.arity, a.delta, a.initial, acc, a.provenance)


def determinize(a: Automaton) -> Dfa:
    """Subset construction over reachable subsets; provenance[i] is the subset."""
    start = frozenset([a.initial])
    ids = {start: 0}
    subsets = [start]
    table = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        row = []
        for i in range(a.nletters):
            nxt = a.step_set(cur, i)
            if nxt not in ids:
                ids[nxt] = len(subsets)
                subsets.append(nxt)
                queue.append(nxt)
            row.append(ids[nxt])
        table.append(row)
    accepting = [i for i, s in enumerate(subsets) if s & a.accepting]
    return Dfa.from_table(a.k, a.arity, table, 0, accepting, tuple(subsets))


def zero_saturate(a: Automaton) -> Automaton:
    """Accept w whenever w followed by some zero letters is accepted."""
    preds: list[list[int]] = [[] for _ in a.states]
    for q, rows in enumerate(a.delta):
        for p in rows[0]:
            preds[p].append(q)
    acc = set(a.accepting)
    stack = list(acc)
    while stack:
        p = stack.pop()
        for q in preds[p]:
            if q not in acc:
                acc.add(q)
                stack.append(q)
    cls = Dfa if isinstance(a, Dfa) else Automaton
    return cls(a.k, a.arity, a.delta, a.initial, acc, a.provenance)


def trim_unreachable(a: Automaton) -> Automaton:
    seen = {a.initial: 0}
    order = [a.initial]
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        for succ in a.delta[q]:
            for p in succ:
                if p not in seen:
                    seen[p] = len(order)
                    order.append(p)
                    queue.append(p)
    delta = [[[seen[p] for p in succ] for succ in a.delta[q]] for q in order]
    acc = [seen[q] for q in order if q in a.accepting]
    return _wrap(a.k, a.arity, delta, 0, acc)


def minimize(a: Automaton) -> Dfa:
    """Moore partition refinement of the reachable part (optional reduction)."""
    d = as_dfa(trim_unreachable(as_dfa(a) if a.is_deterministic() else determinize(a)))
    block = [1 if q in d.accepting else 0 for q in d.states]
    while True:
        sigs: dict[tuple, int] = {}
        new_block = []
        for q in d.states:
            sig = (block[q],) + tuple(block[p] for p in d.table[q])
            new_block.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == len(set(block)):
            break
        block = new_block
    # renumber blocks in BFS order from the initial state
    rep: dict[int, int] = {}
    for q in d.states:
        rep.setdefault(block[q], q)
    order = [block[d.initial]]
    index = {block[d.initial]: 0}
    queue = deque(order)
    table = []
    while queue:
        b = queue.popleft()
        row = []
        for p in d.table[rep[b]]:
            nb = block[p]
            if nb not in index:
                index[nb] = len(order)
                order.append(nb)
                queue.append(nb)
            row.append(index[nb])
        table.append(row)
    acc = [index[b] for b in order if rep[b] in d.accepting]
    return Dfa.from_table(d.k, d.arity, table, 0, acc)


# --------------------------------------------------------------------------
# queries


def is_empty(a: Automaton) -> bool:
    seen = {a.initial}
    stack = [a.initial]
    while stack:
        q = stack.pop()
        if q in a.accepting:
            return False
        for succ in a.delta[q]:
            for p in succ:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
    return True


def enumerate_words(a: Automaton, max_len: int) -> list[tuple[Letter, ...]]:
    """Accepted words of length <= max_len, by length then lexicographically."""
    letters = sorted((letter_digits(a.k, a.arity, i), i) for i in range(a.nletters))
    buckets: list[list] = [[] for _ in range(max_len + 1)]
    cache: dict[tuple, frozenset] = {}

    def step(cur: frozenset, i: int) -> frozenset:
        key = (cur, i)
        if key not in cache:
            cache[key] = a.step_set(cur, i)
        return cache[key]

    def dfs(cur: frozenset, word: list) -> None:
        if cur & a.accepting:
            buckets[len(word)].append(tuple(word))
        if len(word) == max_len:
            return
        for letter, i in letters:
            nxt = step(cur, i)
            if nxt:
                word.append(letter)
                dfs(nxt, word)
                word.pop()

    dfs(frozenset([a.initial]), [])
    return [w for b in buckets for w in b]


def count_words(a: Dfa, length: int) -> int:
    """Number of accepted words of exactly the given length."""
    d = as_dfa(a)
    vec = {d.initial: 1}
    for _ in range(length):
        nxt: dict[int, int] = {}
        for q, c in vec.items():
            for p in d.table[q]:
                nxt[p] = nxt.get(p, 0) + c
        vec = nxt
    return sum(c for q, c in vec.items() if q in d.accepting)


def count_below(a: Dfa, L: int) -> int:
    """|{xs : all components < k^L, member(a, xs)}| for a padding-closed Dfa."""
    return count_words(a, L)


def is_padding_closed(a: Automaton, max_len: int) -> bool:
    """Check w in L iff w.0 in L for all words of length <= max_len.

    Words reaching the same state set behave alike, so each length is
    handled through its set of reachable state sets.
    """
    level = {frozenset([a.initial])}
    for length in range(max_len + 1):
        for cur in level:
            padded = a.step_set(cur, 0)
            if bool(cur & a.accepting) != bool(padded & a.accepting):
                return False
        if length < max_len:
            level = {a.step_set(cur, i) for cur in level for i in range(a.nletters)}
    return True


# --------------------------------------------------------------------------
# random automata for property tests


def random_automaton(rng: random.Random, k: int, arity: int, n_states: int,
                     density: float = 0.5, accept_p: float = 0.5, deterministic: bool = False) -> Automaton:
    nletters = k**arity
    accepting = [q for q in range(n_states) if rng.random() < accept_p]
    if deterministic:
        table = [[rng.randrange(n_states) for _ in range(nletters)] for _ in range(n_states)]
        return Dfa.from_table(k, arity, table, 0, accepting)
    delta = [
        [[p for p in range(n_states) if rng.random() < density] for _ in range(nletters)]
        for _ in range(n_states)
    ]
    return Automaton(k, arity, delta, 0, accepting)


# --------------------------------------------------------------------------
# serialization


def to_json_obj(a: Automaton) -> dict:
    return {
        "k": a.k,
        "arity": a.arity,
        "states": a.num_states,
        "initial": a.initial,
        "accepting": sorted(a.accepting),
        "transitions": [[q, list(letter), p] for q, letter, p in a.transitions()],
    }


def to_json(a: Automaton) -> str:
    return json.dumps(to_json_obj(a), separators=(",", ":"))


def from_json_obj(obj: dict) -> Automaton:
    try:
        k, arity, n = int(obj["k"]), int(obj["arity"]), int(obj["states"])
        initial = int(obj["initial"])
        accepting = [int(q) for q in obj["accepting"]]
        trans = obj["transitions"]
    except (KeyError, TypeError, ValueError) as exc:
        raise AutomatonError(f"malformed automaton JSON: {exc}") from None
    check_base(k)
    delta: list[list[list[int]]] = [[[] for _ in range(k**arity)] for _ in range(n)]
    for entry in trans:
        q, letter, p = entry
        if len(letter) != arity:
            raise AutomatonError(f"letter {letter} has wrong arity")
        if not 0 <= q < n:
            raise AutomatonError("transition source out of range")
        delta[q][letter_index(k, letter)].append(int(p))
    return _wrap(k, arity, delta, initial, accepting)


def from_json(text: str) -> Automaton:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AutomatonError(f"invalid JSON: {exc}") from None
    return from_json_obj(obj)


def sink_states(a: Automaton) -> set[int]:
    """Rejecting states whose every transition loops back to themselves."""
    return {
        q for q in a.states
        if q not in a.accepting and all(succ == (q,) for succ in a.delta[q])
    }


def to_dot(a: Automaton, hide_sink: bool = False, name: str = "A") -> str:
    hidden = sink_states(a) if hide_sink else set()
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in a.states:
        if q in hidden:
            continue
        shape = "doublecircle" if q in a.accepting else "circle"
        lines.append(f'  q{q} [shape={shape}, label="q{q}"];')
    lines.append(f"  __start -> q{a.initial};")
    edges: dict[tuple[int, int], list[str]] = {}
    for q, letter, p in a.transitions():
        if q in hidden or p in hidden:
            continue
        edges.setdefault((q, p), []).append("(" + ",".join(map(str, letter)) + ")")
    for (q, p), labels in sorted(edges.items()):
        lines.append(f'  q{q} -> q{p} [label="{" ".join(labels)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
