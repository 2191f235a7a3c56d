"""Regular languages as a computable poset: parsing, canonical DFAs,
decidable inclusion, quotients, and the canonical enumeration.

The expression language over an alphabet Sigma uses union '+', explicit
concatenation '·', postfix star '*', parentheses, and single-character
symbols; '()' is the empty-word expression and there is no implicit
concatenation. The evaluation map zeta is total: ill-formed text (including
the empty text) denotes the empty language rather than raising.

Canonical form is the minimal total DFA with states renumbered breadth-first
from the start over the alphabet in declared order, so two DFAs accept the
same language exactly when they are structurally equal. That makes language
identity a hash lookup, which the enumeration (eta) uses to list each
regular language exactly once.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ConfigError, ResourceError, VerificationError
from .limits import Evaluator

__all__ = [
    "RegexAst",
    "parse_regex",
    "Dfa",
    "to_canonical_dfa",
    "language_leq",
    "quotient",
    "quotient_evaluator",
    "RegHandle",
    "reg_rank",
    "reg_unrank",
    "canonical_regex",
    "dfa_to_json",
    "dfa_from_json",
    "EMPTY_EXPRESSION",
]

OPERATOR_CHARS = "+*·()"
CONCAT = "·"
EMPTY_EXPRESSION = "("  # designated ill-formed text for the empty language


# ----------------------------------------------------------------- parsing


@dataclass(frozen=True)
class RegexAst:
    """Tree over union/concat/star/symbol/empty-word, plus the source text."""

    op: str  # "sym" | "cat" | "alt" | "star" | "eps"
    sym: Optional[str] = None
    left: Optional["RegexAst"] = None
    right: Optional["RegexAst"] = None

    def __repr__(self):  # pragma: no cover
        return f"RegexAst({render_ast(self)!r})"


def _sym(c):
    return RegexAst("sym", sym=c)


_EPS = RegexAst("eps")


class _Parser:
    def __init__(self, text: str, sigma: tuple[str, ...]):
        self.text = text
        self.pos = 0
        self.sigma = set(sigma)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def expr(self) -> RegexAst:
        node = self.term()
        while self.peek() == "+":
            self.pos += 1
            node = RegexAst("alt", left=node, right=self.term())
        return node

    def term(self) -> RegexAst:
        node = self.factor()
        while self.peek() == CONCAT:
            self.pos += 1
            node = RegexAst("cat", left=node, right=self.factor())
        return node

    def factor(self) -> RegexAst:
        node = self.base()
        while self.peek() == "*":
            self.pos += 1
            node = RegexAst("star", left=node)
        return node

    def base(self) -> RegexAst:
        c = self.peek()
        if c == "(":
            self.pos += 1
            if self.peek() == ")":
                self.pos += 1
                return _EPS
            node = self.expr()
            if self.peek() != ")":
                raise ValueError("missing )")
            self.pos += 1
            return node
        if c is not None and c in self.sigma:
            self.pos += 1
            return _sym(c)
        raise ValueError(f"unexpected {c!r}")


def parse_regex(text: str, sigma: Sequence[str]) -> RegexAst | None:
    """zeta's syntactic half: an AST for well-formed text, None (the empty
    language) for everything else. Never raises on bad text."""
    sigma = tuple(sigma)
    if set(sigma) & set(OPERATOR_CHARS):
        raise ConfigError("alphabet symbols collide with operator characters")
    if not text:
        return None
    if any(c not in set(sigma) | set(OPERATOR_CHARS) for c in text):
        return None
    parser = _Parser(text, sigma)
    try:
        node = parser.expr()
    except ValueError:
        return None
    if parser.pos != len(text):
        return None
    return node


# -------------------------------------------------------------------- DFAs


@dataclass(frozen=True)
class Dfa:
    """Total DFA; canonical instances are minimal with BFS state numbering,
    so canonical DFAs are language-equal iff equal as values."""

    n: int
    start: int
    accept: frozenset[int]
    delta: tuple[tuple[int, ...], ...]  # delta[state][symbol index]
    alphabet: tuple[str, ...]
    canonical: bool = False

    def step(self, state: int, word: str) -> int:
        index = {c: i for i, c in enumerate(self.alphabet)}
        for c in word:
            if c not in index:
                raise ConfigError(f"symbol {c!r} outside alphabet {self.alphabet}")
            state = self.delta[state][index[c]]
        return state

    def accepts(self, word: str) -> bool:
        return self.step(self.start, word) in self.accept


def dfa_to_json(d: Dfa) -> str:
    return json.dumps(
        {
            "n": d.n,
            "start": d.start,
            "accept": sorted(d.accept),
            "delta": [list(row) for row in d.delta],
        },
        sort_keys=True,
    )


def dfa_from_json(text: str, alphabet: Sequence[str]) -> Dfa:
    try:
        data = json.loads(text)
        d = Dfa(
            n=int(data["n"]),
            start=int(data["start"]),
            accept=frozenset(int(x) for x in data["accept"]),
            delta=tuple(tuple(int(x) for x in row) for row in data["delta"]),
            alphabet=tuple(alphabet),
        )
    except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad DFA JSON: {exc}") from exc
    if len(d.delta) != d.n or any(len(row) != len(d.alphabet) for row in d.delta):
        raise ConfigError("DFA transition table has the wrong shape")
    return d


def _thompson(ast: RegexAst | None, k: int):
    """AST -> epsilon-NFA as (state count, [(src, symidx|None, dst)], start,
    accept). None denotes the empty language."""
    edges: list[tuple[int, Optional[int], int]] = []
    counter = [0]

    def fresh():
        counter[0] += 1
        return counter[0] - 1

    def build(node) -> tuple[int, int]:
        if node.op == "sym":
            s, t = fresh(), fresh()
            edges.append((s, node.sym, t))
            return s, t
        if node.op == "eps":
            s, t = fresh(), fresh()
            edges.append((s, None, t))
            return s, t
        if node.op == "alt":
            s, t = fresh(), fresh()
            ls, lt = build(node.left)
            rs, rt = build(node.right)
            edges.extend([(s, None, ls), (s, None, rs), (lt, None, t), (rt, None, t)])
            return s, t
        if node.op == "cat":
            ls, lt = build(node.left)
            rs, rt = build(node.right)
            edges.append((lt, None, rs))
            return ls, rt
        if node.op == "star":
            s, t = fresh(), fresh()
            ls, lt = build(node.left)
            edges.extend([(s, None, ls), (lt, None, t), (s, None, t), (lt, None, ls)])
            return s, t
        raise AssertionError(node.op)

    if ast is None:
        s, t = fresh(), fresh()  # no edge between them: accepts nothing
        return counter[0], edges, s, t
    start, acc = build(ast)
    return counter[0], edges, start, acc


def _subset_construct(nstates, edges, start, acc, alphabet) -> Dfa:
    k = len(alphabet)
    sym_index = {c: i for i, c in enumerate(alphabet)}
    eps: dict[int, list[int]] = {}
    bysym: dict[tuple[int, int], list[int]] = {}
    for (s, c, t) in edges:
        if c is None:
            eps.setdefault(s, []).append(t)
        else:
            bysym.setdefault((s, sym_index[c]), []).append(t)

    def closure(states: frozenset[int]) -> frozenset[int]:
        stack = list(states)
        out = set(states)
        while stack:
            s = stack.pop()
            for t in eps.get(s, ()):
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return frozenset(out)

    start_set = closure(frozenset([start]))
    index = {start_set: 0}
    order = [start_set]
    delta_rows = []
    i = 0
    while i < len(order):
        cur = order[i]
        row = []
        for a in range(k):
            nxt = closure(
                frozenset(t for s in cur for t in bysym.get((s, a), ()))
            )
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        delta_rows.append(tuple(row))
        i += 1
    accept = frozenset(i for i, st in enumerate(order) if acc in st)
    return Dfa(len(order), 0, accept, tuple(delta_rows), tuple(alphabet))


def _minimize(d: Dfa) -> Dfa:
    # Moore partition refinement over the (already total) automaton
    k = len(d.alphabet)
    block = [1 if q in d.accept else 0 for q in range(d.n)]
    while True:
        signatures = {}
        new_block = []
        for q in range(d.n):
            sig = (block[q],) + tuple(block[d.delta[q][a]] for a in range(k))
            if sig not in signatures:
                signatures[sig] = len(signatures)
            new_block.append(signatures[sig])
        if new_block == block:
            break
        block = new_block
    m = max(block) + 1
    delta = [[0] * k for _ in range(m)]
    accept = set()
    for q in range(d.n):
        for a in range(k):
            delta[block[q]][a] = block[d.delta[q][a]]
        if q in d.accept:
            accept.add(block[q])
    return Dfa(m, block[d.start], frozenset(accept), tuple(map(tuple, delta)), d.alphabet)


def _bfs_renumber(d: Dfa) -> Dfa:
    k = len(d.alphabet)
    number = {d.start: 0}
    order = [d.start]
    i = 0
    while i < len(order):
        q = order[i]
        for a in range(k):
            t = d.delta[q][a]
            if t not in number:
                number[t] = len(order)
                order.append(t)
        i += 1
    delta = tuple(
        tuple(number[d.delta[q][a]] for a in range(k)) for q in order
    )
    accept = frozenset(number[q] for q in d.accept if q in number)
    return Dfa(len(order), 0, accept, delta, d.alphabet, canonical=True)


def to_canonical_dfa(ast: RegexAst | None, sigma: Sequence[str]) -> Dfa:
    """Thompson, subset construction, minimization, BFS renumbering."""
    sigma = tuple(sigma)
    nstates, edges, start, acc = _thompson(ast, len(sigma))
    return _bfs_renumber(_minimize(_subset_construct(nstates, edges, start, acc, sigma)))


def canonicalize_dfa(d: Dfa) -> Dfa:
    return _bfs_renumber(_minimize(d))


def language_leq(l1: Dfa, l2: Dfa) -> bool:
    """L(l1) subseteq L(l2) by emptiness of l1 minus l2 on the product."""
    if l1.alphabet != l2.alphabet:
        raise ConfigError(
            f"alphabet mismatch: {l1.alphabet} vs {l2.alphabet}"
        )
    k = len(l1.alphabet)
    seen = {(l1.start, l2.start)}
    stack = [(l1.start, l2.start)]
    while stack:
        p, q = stack.pop()
        if p in l1.accept and q not in l2.accept:
            return False
        for a in range(k):
            nxt = (l1.delta[p][a], l2.delta[q][a])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def quotient(l: Dfa, words: Iterable[str]) -> Dfa:
    """M^-1 L: the language read from the set of states that the words of M
    reach from the start; canonical on return."""
    x = frozenset(l.step(l.start, w) for w in words)
    if not x:
        none = to_canonical_dfa(None, l.alphabet)
        return none
    k = len(l.alphabet)
    index = {x: 0}
    order = [x]
    rows = []
    i = 0
    while i < len(order):
        cur = order[i]
        row = []
        for a in range(k):
            nxt = frozenset(l.delta[q][a] for q in cur)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        rows.append(tuple(row))
        i += 1
    accept = frozenset(
        i for i, st in enumerate(order) if st & l.accept
    )
    return canonicalize_dfa(
        Dfa(len(order), 0, accept, tuple(rows), l.alphabet)
    )


def quotient_evaluator(l: Dfa, words: Sequence[str]) -> Evaluator:
    """The quotient approximation process over the reg poset: value at t is
    the quotient of l by the first t+1 enumerated words. Monotone increasing
    under inclusion, and the value changes at most |states(l)| times because
    the reached state set only grows."""
    if not l.canonical:
        l = canonicalize_dfa(l)

    def fn(x, t, fuel):
        return RegHandle(quotient(l, words[: t + 1]))

    return Evaluator(fn, name="quotient")


# -------------------------------------------------- canonical enumeration


class _Enumeration:
    """Append-only length-lex enumeration of regex texts, deduplicated by
    canonical DFA; shared per alphabet and safe to extend under a lock."""

    def __init__(self, sigma: tuple[str, ...]):
        self.sigma = sigma
        self.symbols = list(sigma) + list("+*" + CONCAT + "()")
        self.languages: list[Dfa] = []
        self.texts: list[str] = []
        self.by_dfa: dict[Dfa, int] = {}
        self.scanned = 0
        self.lock = threading.Lock()
        self._gen = self._texts()

    def _texts(self):
        frontier = [""]
        while True:
            for text in frontier:
                yield text
            frontier = [t + c for t in frontier for c in self.symbols]

    def extend_to(self, count: int, max_texts: int):
        with self.lock:
            while len(self.languages) <= count:
                if self.scanned >= max_texts:
                    raise ResourceError(
                        f"regular-language enumeration ceiling hit after {max_texts} texts"
                    )
                text = next(self._gen)
                self.scanned += 1
                dfa = to_canonical_dfa(parse_regex(text, self.sigma), self.sigma)
                if dfa not in self.by_dfa:
                    self.by_dfa[dfa] = len(self.languages)
                    self.languages.append(dfa)
                    self.texts.append(text)


_enumerations: dict[tuple[str, ...], _Enumeration] = {}
_enum_lock = threading.Lock()

ENUMERATION_TEXT_CEILING = 400_000


def _enumeration_for(sigma: tuple[str, ...]) -> _Enumeration:
    with _enum_lock:
        if sigma not in _enumerations:
            _enumerations[sigma] = _Enumeration(sigma)
        return _enumerations[sigma]


@dataclass(frozen=True)
class RegHandle:
    """A regular language: its canonical DFA plus the cached enumeration rank
    (None until computed). Equality and hashing ignore the cached rank."""

    dfa: Dfa
    rank: Optional[int] = None

    def __eq__(self, other):
        return isinstance(other, RegHandle) and self.dfa == other.dfa

    def __hash__(self):
        return hash(self.dfa)


def reg_unrank(k: int, sigma: Sequence[str]) -> RegHandle:
    enum = _enumeration_for(tuple(sigma))
    enum.extend_to(k, ENUMERATION_TEXT_CEILING)
    return RegHandle(enum.languages[k], k)


def reg_rank(h: RegHandle) -> int:
    if h.rank is not None:
        return h.rank
    enum = _enumeration_for(h.dfa.alphabet)
    key = h.dfa if h.dfa.canonical else canonicalize_dfa(h.dfa)
    scanned = len(enum.languages)
    while True:
        if key in enum.by_dfa:
            return enum.by_dfa[key]
        enum.extend_to(scanned + 64, ENUMERATION_TEXT_CEILING)
        scanned = len(enum.languages)


# ----------------------------------------------------- regex reconstruction


def render_ast(node: RegexAst) -> str:
    if node.op == "sym":
        return node.sym
    if node.op == "eps":
        return "()"
    if node.op == "star":
        inner = render_ast(node.left)
        if node.left.op in ("sym", "eps"):
            return inner + "*"
        return "(" + inner + ")*"
    if node.op == "cat":
        parts = []
        for child in (node.left, node.right):
            text = render_ast(child)
            parts.append("(" + text + ")" if child.op == "alt" else text)
        return CONCAT.join(parts)
    if node.op == "alt":
        return render_ast(node.left) + "+" + render_ast(node.right)
    raise AssertionError(node.op)


def _alt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a == b:
        return a
    return RegexAst("alt", left=a, right=b)


def _cat(a, b):
    if a is None or b is None:
        return None
    if a.op == "eps":
        return b
    if b.op == "eps":
        return a
    return RegexAst("cat", left=a, right=b)


def _star(a):
    if a is None or a.op == "eps":
        return _EPS
    if a.op == "star":
        return a
    return RegexAst("star", left=a)


def canonical_regex(d: Dfa) -> str:
    """An expression text for the language of a canonical DFA, by state
    elimination in ascending state order; round-trips through
    to_canonical_dfa back to the input (checked here)."""
    if not d.canonical:
        raise ConfigError("canonical_regex needs a canonical DFA")
    start, target = d.n, d.n + 1
    arcs: dict[tuple[int, int], RegexAst | None] = {}

    def add(i, j, ast):
        arcs[(i, j)] = _alt(arcs.get((i, j)), ast)

    for q in range(d.n):
        for a, c in enumerate(d.alphabet):
            add(q, d.delta[q][a], _sym(c))
    add(start, d.start, _EPS)
    for q in d.accept:
        add(q, target, _EPS)

    for q in range(d.n):  # ascending elimination order
        loop = arcs.pop((q, q), None)
        loop_star = _star(loop) if loop is not None else None
        ins = [(i, ast) for (i, j), ast in arcs.items() if j == q and i != q]
        outs = [(j, ast) for (i, j), ast in arcs.items() if i == q and j != q]
        for (i, _) in ins:
            arcs.pop((i, q))
        for (j, _) in outs:
            arcs.pop((q, j))
        for (i, ain) in ins:
            for (j, aout) in outs:
                mid = _cat(ain, aout) if loop_star is None else _cat(ain, _cat(loop_star, aout))
                add(i, j, mid)

    final = arcs.get((start, target))
    text = EMPTY_EXPRESSION if final is None else render_ast(final)
    back = to_canonical_dfa(parse_regex(text, d.alphabet), d.alphabet)
    if back != d:
        raise VerificationError(
            f"state elimination produced {text!r}, which does not round-trip"
        )
    return text
