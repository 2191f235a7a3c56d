"""Computable partially ordered sets: a rank bijection plus a decidable order.

A PosetInstance bundles the bijection between naturals and elements (``rank``/
``unrank``), the order decider (``leq``), and optional structural metadata.
Instances are immutable and all operations are pure, so they can be shared
freely.

Instances come from a small spec DSL:

    nat | int | prefix:<alphabet> | lexico:<order-expr> | finsets
        | reg:<alphabet> | rev(<spec>) | discrete(<spec>)

``<order-expr>`` lists chains of single-character symbols separated by ';',
e.g. ``a<b<c`` (total) or ``a<b;c`` (c incomparable to both). The element
enumeration for word posets is length-lexicographic in the declared symbol
order and does not depend on the order relation, so order pairs such as
prefix:ab / lexico:a<b share one carrier and one rank map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

from .errors import ConfigError, DomainError

__all__ = [
    "PosetMeta",
    "PosetInstance",
    "parse_poset_spec",
    "reverse",
    "finite_greatest",
    "escape_element",
    "finite_order_from_json",
]


@dataclass(frozen=True)
class PosetMeta:
    """Structural claims about an instance; every field is optional and must
    stay consistent with the order decider (tests sample-check this)."""

    has_minimum: bool = False
    minimum_rank: Optional[int] = None
    minimal_elements: Optional[tuple[int, ...]] = None
    height_bound: Optional[int] = None
    has_maximum: bool = False
    maximum_rank: Optional[int] = None


@dataclass(frozen=True)
class PosetInstance:
    spec: str
    _unrank: Callable[[int], Any]
    _rank: Callable[[Any], int]
    _leq: Callable[[Any, Any], bool]
    meta: PosetMeta
    _fmt: Callable[[Any], str] = str

    def unrank(self, n: int) -> Any:
        if not isinstance(n, int) or n < 0:
            raise DomainError(f"rank must be a natural number, got {n!r}")
        return self._unrank(n)

    def rank(self, e: Any) -> int:
        return self._rank(e)

    def leq(self, a: Any, b: Any) -> bool:
        return self._leq(a, b)

    def lt(self, a: Any, b: Any) -> bool:
        return a != b and self._leq(a, b)

    def format_elem(self, e: Any) -> str:
        return self._fmt(e)

    def __repr__(self) -> str:  # pragma: no cover
        return f"PosetInstance({self.spec!r})"


def reverse(p: PosetInstance) -> PosetInstance:
    """The reverse order on the same carrier; min-semantics everywhere is
    max-semantics over reverse(p), never a separate code path."""
    meta = PosetMeta(
        has_minimum=p.meta.has_maximum,
        minimum_rank=p.meta.maximum_rank,
        minimal_elements=None,
        height_bound=p.meta.height_bound,
        has_maximum=p.meta.has_minimum,
        maximum_rank=p.meta.minimum_rank,
    )
    return PosetInstance(
        spec=f"rev({p.spec})",
        _unrank=p._unrank,
        _rank=p._rank,
        _leq=lambda a, b: p._leq(b, a),
        meta=meta,
        _fmt=p._fmt,
    )


def _discrete(p: PosetInstance) -> PosetInstance:
    def leq(a, b):
        p._leq(a, b)  # validate the pair against the carrier
        return a == b

    return PosetInstance(
        spec=f"discrete({p.spec})",
        _unrank=p._unrank,
        _rank=p._rank,
        _leq=leq,
        meta=PosetMeta(height_bound=1),
        _fmt=p._fmt,
    )


# ---------------------------------------------------------------- carriers


def _nat() -> PosetInstance:
    def rank(e):
        if not isinstance(e, int) or isinstance(e, bool) or e < 0:
            raise DomainError(f"not a natural number: {e!r}")
        return e

    return PosetInstance(
        spec="nat",
        _unrank=lambda n: n,
        _rank=rank,
        _leq=lambda a, b: rank(a) <= rank(b),
        meta=PosetMeta(has_minimum=True, minimum_rank=0, minimal_elements=(0,)),
    )


def _int() -> PosetInstance:
    # zigzag enumeration 0, 1, -1, 2, -2, ...
    def unrank(n):
        return (n + 1) // 2 if n % 2 == 1 else -(n // 2)

    def rank(e):
        if not isinstance(e, int) or isinstance(e, bool):
            raise DomainError(f"not an integer: {e!r}")
        return 2 * e - 1 if e > 0 else -2 * e

    def leq(a, b):
        rank(a)
        rank(b)
        return a <= b

    return PosetInstance(
        spec="int",
        _unrank=unrank,
        _rank=rank,
        _leq=leq,
        meta=PosetMeta(),
    )


def _word_carrier(alphabet: str):
    """Length-lexicographic rank/unrank over the declared symbol listing."""
    k = len(alphabet)
    index = {c: i for i, c in enumerate(alphabet)}

    def check(w):
        if not isinstance(w, str) or any(c not in index for c in w):
            raise DomainError(f"not a word over {alphabet!r}: {w!r}")
        return w

    def unrank(n):
        if k == 1:
            return alphabet * n
        length, count = 0, 1
        while n >= count:
            n -= count
            length += 1
            count *= k
        digits = []
        for _ in range(length):
            digits.append(alphabet[n % k])
            n //= k
        return "".join(reversed(digits))

    def rank(w):
        check(w)
        if k == 1:
            return len(w)
        base = (k ** len(w) - 1) // (k - 1)
        idx = 0
        for c in w:
            idx = idx * k + index[c]
        return base + idx

    return check, unrank, rank


def _parse_alphabet(text: str) -> str:
    if not text:
        raise ConfigError("alphabet must not be empty")
    if len(set(text)) != len(text):
        raise ConfigError(f"alphabet has repeated symbols: {text!r}")
    return text


def _prefix(alphabet: str) -> PosetInstance:
    alphabet = _parse_alphabet(alphabet)
    check, unrank, rank = _word_carrier(alphabet)

    def leq(a, b):
        check(a)
        check(b)
        return b.startswith(a)

    return PosetInstance(
        spec=f"prefix:{alphabet}",
        _unrank=unrank,
        _rank=rank,
        _leq=leq,
        meta=PosetMeta(has_minimum=True, minimum_rank=0, minimal_elements=(0,)),
        _fmt=lambda w: w if w else "ε",
    )


def _parse_order_expr(expr: str) -> tuple[str, set[tuple[str, str]]]:
    """Parse chains like a<b<c;d into (alphabet, strict symbol relation)."""
    if not expr:
        raise ConfigError("empty symbol order expression")
    seen: list[str] = []
    lt: set[tuple[str, str]] = set()
    for group in expr.split(";"):
        if not group:
            raise ConfigError(f"empty chain group in {expr!r}")
        chain = group.split("<")
        for sym in chain:
            if len(sym) != 1:
                raise ConfigError(f"symbols must be single characters, got {sym!r}")
            if sym not in seen:
                seen.append(sym)
        for i in range(len(chain)):
            for j in range(i + 1, len(chain)):
                lt.add((chain[i], chain[j]))
    # transitive closure across repeated symbols
    changed = True
    while changed:
        changed = False
        for (a, b) in list(lt):
            for (c, d) in list(lt):
                if b == c and (a, d) not in lt:
                    lt.add((a, d))
                    changed = True
    for (a, b) in lt:
        if (b, a) in lt or a == b:
            raise ConfigError(f"symbol order is not antisymmetric: {expr!r}")
    return "".join(seen), lt


def _lexico(expr: str) -> PosetInstance:
    alphabet, sym_lt = _parse_order_expr(expr)
    check, unrank, rank = _word_carrier(alphabet)

    def leq(a, b):
        check(a)
        check(b)
        if a == b:
            return True
        # proper prefix, or strictly ordered symbols at the first difference
        n = min(len(a), len(b))
        for i in range(n):
            if a[i] != b[i]:
                return (a[i], b[i]) in sym_lt
        return len(a) < len(b)

    return PosetInstance(
        spec=f"lexico:{expr}",
        _unrank=unrank,
        _rank=rank,
        _leq=leq,
        meta=PosetMeta(has_minimum=True, minimum_rank=0, minimal_elements=(0,)),
        _fmt=lambda w: w if w else "ε",
    )


def _finsets() -> PosetInstance:
    # elements are sorted duplicate-free tuples; rank is the bit mask
    def check(e):
        if (
            not isinstance(e, tuple)
            or any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for x in e)
            or list(e) != sorted(set(e))
        ):
            raise DomainError(f"not a sorted duplicate-free tuple of naturals: {e!r}")
        return e

    def unrank(n):
        out = []
        pos = 0
        while n:
            if n & 1:
                out.append(pos)
            n >>= 1
            pos += 1
        return tuple(out)

    def rank(e):
        check(e)
        mask = 0
        for x in e:
            mask |= 1 << x
        return mask

    def leq(a, b):
        check(a)
        check(b)
        return set(a) <= set(b)

    return PosetInstance(
        spec="finsets",
        _unrank=unrank,
        _rank=rank,
        _leq=leq,
        meta=PosetMeta(has_minimum=True, minimum_rank=0, minimal_elements=(0,)),
        _fmt=lambda e: "{" + ",".join(map(str, e)) + "}",
    )


def _reg(alphabet: str) -> PosetInstance:
    alphabet = _parse_alphabet(alphabet)
    from . import automata  # deferred: automata is a heavier module

    sigma = tuple(alphabet)

    def unrank(n):
        return automata.reg_unrank(n, sigma)

    def rank(h):
        return automata.reg_rank(h)

    def leq(a, b):
        return automata.language_leq(a.dfa, b.dfa)

    return PosetInstance(
        spec=f"reg:{alphabet}",
        _unrank=unrank,
        _rank=rank,
        _leq=leq,
        # minimum is the empty language (the shortest text is ill-formed);
        # a maximum (Sigma*) exists but its rank is not precomputed
        meta=PosetMeta(has_minimum=True, minimum_rank=0, minimal_elements=(0,), has_maximum=True),
        _fmt=lambda h: automata.canonical_regex(h.dfa),
    )


def parse_poset_spec(spec: str) -> PosetInstance:
    """Build the instance named by the spec DSL; ConfigError on bad input."""
    if not isinstance(spec, str):
        raise ConfigError(f"poset spec must be a string, got {type(spec).__name__}")
    spec = spec.strip()
    if spec == "nat":
        return _nat()
    if spec == "int":
        return _int()
    if spec == "finsets":
        return _finsets()
    if spec.startswith("prefix:"):
        return _prefix(spec[len("prefix:"):])
    if spec.startswith("lexico:"):
        return _lexico(spec[len("lexico:"):])
    if spec.startswith("reg:"):
        return _reg(spec[len("reg:"):])
    if spec.startswith("rev(") and spec.endswith(")"):
        return reverse(parse_poset_spec(spec[4:-1]))
    if spec.startswith("discrete(") and spec.endswith(")"):
        return _discrete(parse_poset_spec(spec[9:-1]))
    raise ConfigError(f"unknown poset spec: {spec!r}")


# ------------------------------------------------------- finite-set helpers


def _check_element_set(p: PosetInstance, elems: Sequence[Any]) -> list[Any]:
    ranks = [p.rank(e) for e in elems]
    if len(set(ranks)) != len(ranks):
        raise DomainError(f"element set has duplicates: {list(elems)!r}")
    return list(elems)


def finite_greatest(p: PosetInstance, elems: Sequence[Any]) -> Any | None:
    """The greatest element of a finite set if it exists (every member lies
    below it), else None. Note: greatest, not merely maximal."""
    elems = _check_element_set(p, elems)
    for g in elems:
        if all(p.leq(s, g) for s in elems):
            return g
    return None


def escape_element(p: PosetInstance, elems: Sequence[Any], search_bound: int) -> Any | None:
    """First element d in rank order with s not<= d for every s in the set,
    scanning ranks 0..search_bound-1; None when the scan exhausts.

    This is the desk-scale dovetailing gamma used by the diagonalizations:
    an element that dominates nothing in the given set.
    """
    if search_bound < 1:
        raise ConfigError(f"search_bound must be >= 1, got {search_bound}")
    elems = _check_element_set(p, elems)
    for r in range(search_bound):
        d = p.unrank(r)
        if all(not p.leq(s, d) for s in elems):
            return d
    return None


def finite_order_from_json(text: str) -> tuple[list[str], set[tuple[int, int]]]:
    """Load the JSON finite-order format: {"elements": [...], "lt": [[i,j],...]}.

    The given pairs may be a covering or the full relation; the transitive
    closure is taken here. Returns (names, strict relation on indices).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad finite-order JSON: {exc}") from exc
    if not isinstance(data, dict) or "elements" not in data or "lt" not in data:
        raise ConfigError('finite-order JSON needs "elements" and "lt" keys')
    names = [str(x) for x in data["elements"]]
    n = len(names)
    lt: set[tuple[int, int]] = set()
    for pair in data["lt"]:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError(f"bad lt pair: {pair!r}")
        i, j = pair
        if not (0 <= i < n and 0 <= j < n):
            raise ConfigError(f"lt pair out of range: {pair!r}")
        lt.add((i, j))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(lt):
            for (c, d) in list(lt):
                if b == c and (a, d) not in lt:
                    lt.add((a, d))
                    changed = True
    for (a, b) in lt:
        if a == b or (b, a) in lt:
            raise ConfigError("finite order is not a strict partial order")
    return names, lt
