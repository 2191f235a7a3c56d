"""Finite-order combinatorics: chains, antichains, Dilworth decompositions,
and the chain/antichain condition checkers for order pairs.

A FinitePoset is a strict order on {0..n-1} (transitively closed at
construction); an OrderPair is a weak order together with a strong extension
on the same carrier. The condition checkers search subsets in one fixed
deterministic order: increasing maximum rank first, then lexicographically
on the ascending rank tuple, so the returned witness is a function of the
input alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigError, ResourceError, VerificationError
from .posets import PosetInstance, finite_order_from_json

__all__ = [
    "FinitePoset",
    "OrderPair",
    "max_antichain",
    "min_chain_cover",
    "check_star",
    "check_dagger",
    "chain_antichain_family",
    "family_posets",
    "order_pair_fragment",
    "N_BOUND",
    "SUBSET_SEARCH_BOUND",
]

N_BOUND = 20  # exact antichain/cover work stops here
SUBSET_SEARCH_BOUND = 16  # carrier ceiling for exhaustive subset searches


@dataclass(frozen=True)
class FinitePoset:
    """Strict partial order on {0..n-1}; the relation is stored transitively
    closed and validated."""

    n: int
    lt: frozenset[tuple[int, int]]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        closed = set(self.lt)
        changed = True
        while changed:
            changed = False
            for (a, b) in list(closed):
                for (c, d) in list(closed):
                    if b == c and (a, d) not in closed:
                        closed.add((a, d))
                        changed = True
        object.__setattr__(self, "lt", frozenset(closed))
        for (a, b) in self.lt:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ConfigError(f"relation pair out of range: {(a, b)}")
            if a == b or (b, a) in self.lt:
                raise ConfigError("not a strict partial order")
        if self.names and len(self.names) != self.n:
            raise ConfigError("names do not match the carrier size")

    @staticmethod
    def from_json(text: str) -> "FinitePoset":
        names, lt = finite_order_from_json(text)
        return FinitePoset(len(names), frozenset(lt), tuple(names))

    def comparable(self, a: int, b: int) -> bool:
        return a == b or (a, b) in self.lt or (b, a) in self.lt

    def name_of(self, i: int) -> str:
        return self.names[i] if self.names else str(i)

    def restrict(self, subset: Sequence[int]) -> "FinitePoset":
        """The induced order on the given elements (renumbered 0..len-1)."""
        idx = {e: i for i, e in enumerate(subset)}
        lt = frozenset(
            (idx[a], idx[b]) for (a, b) in self.lt if a in idx and b in idx
        )
        names = tuple(self.name_of(e) for e in subset)
        return FinitePoset(len(subset), lt, names)

    def comparability_masks(self) -> list[int]:
        masks = [0] * self.n
        for (a, b) in self.lt:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return masks


@dataclass(frozen=True)
class OrderPair:
    """Two orders on one carrier, the strong one extending the weak one."""

    weak: FinitePoset
    strong: FinitePoset

    def __post_init__(self):
        if self.weak.n != self.strong.n:
            raise ConfigError("order pair carriers differ")
        if not self.weak.lt <= self.strong.lt:
            missing = sorted(self.weak.lt - self.strong.lt)[0]
            raise ConfigError(
                f"strong order does not extend the weak one (missing {missing})"
            )


def max_antichain(fp: FinitePoset) -> list[int]:
    """A maximum-cardinality antichain by exact branch-and-bound search;
    the Dilworth bound from the matching-based cover is asserted on the way
    out."""
    if fp.n > N_BOUND:
        raise ResourceError(f"carrier too large for exact search: {fp.n} > {N_BOUND}")
    comp = fp.comparability_masks()
    best: list[int] = []

    def dfs(i: int, chosen: list[int], chosen_mask: int):
        nonlocal best
        if len(chosen) + (fp.n - i) <= len(best):
            return
        if i == fp.n:
            best = list(chosen)
            return
        if not (comp[i] & chosen_mask):
            chosen.append(i)
            dfs(i + 1, chosen, chosen_mask | (1 << i))
            chosen.pop()
        dfs(i + 1, chosen, chosen_mask)

    dfs(0, [], 0)
    if fp.n and len(best) != fp.n - _max_matching(fp):
        raise VerificationError("antichain size disagrees with the matching bound")
    return best


def _max_matching(fp: FinitePoset) -> int:
    """Maximum bipartite matching on the strict relation (Kuhn's algorithm)."""
    succ = [[] for _ in range(fp.n)]
    for (a, b) in sorted(fp.lt):
        succ[a].append(b)
    match_right: dict[int, int] = {}

    def try_augment(a: int, visited: set[int]) -> bool:
        for b in succ[a]:
            if b in visited:
                continue
            visited.add(b)
            if b not in match_right or try_augment(match_right[b], visited):
                match_right[b] = a
                return True
        return False

    size = 0
    for a in range(fp.n):
        if try_augment(a, set()):
            size += 1
    return size


def min_chain_cover(fp: FinitePoset) -> list[list[int]]:
    """A minimum family of chains covering the carrier, from the maximum
    matching; by Dilworth its size equals the maximum antichain size."""
    if fp.n > N_BOUND:
        raise ResourceError(f"carrier too large for exact search: {fp.n} > {N_BOUND}")
    succ = [[] for _ in range(fp.n)]
    for (a, b) in sorted(fp.lt):
        succ[a].append(b)
    match_right: dict[int, int] = {}

    def try_augment(a: int, visited: set[int]) -> bool:
        for b in succ[a]:
            if b in visited:
                continue
            visited.add(b)
            if b not in match_right or try_augment(match_right[b], visited):
                match_right[b] = a
                return True
        return False

    for a in range(fp.n):
        try_augment(a, set())
    next_of = {a: b for b, a in match_right.items()}
    has_pred = set(match_right)
    chains = []
    for start in range(fp.n):
        if start in has_pred:
            continue
        chain = [start]
        while chain[-1] in next_of:
            chain.append(next_of[chain[-1]])
        chains.append(chain)
    return chains


def _subsets_lex(start: int, stop: int):
    """All ascending tuples over [start, stop) in lexicographic order."""
    yield ()
    for i in range(start, stop):
        for rest in _subsets_lex(i + 1, stop):
            yield (i,) + rest


def _is_strong_chain(pair: OrderPair, subset: Sequence[int]) -> bool:
    return all(
        pair.strong.comparable(a, b)
        for a, b in itertools.combinations(subset, 2)
    )


def _is_weak_antichain(pair: OrderPair, subset: Sequence[int]) -> bool:
    return not any(
        pair.weak.comparable(a, b) and a != b
        for a, b in itertools.combinations(subset, 2)
    )


def check_star(pair: OrderPair, k: int) -> list[int] | None:
    """A k-element strong chain that is a weak antichain, or None after the
    exhaustive ordered subset search."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    n = pair.weak.n
    if n > SUBSET_SEARCH_BOUND:
        raise ResourceError(f"carrier too large for subset search: {n}")
    for m in range(k - 1, n):
        for combo in itertools.combinations(range(m), k - 1):
            subset = combo + (m,)
            if _is_strong_chain(pair, subset) and _is_weak_antichain(pair, subset):
                return _strong_sort(pair, subset)
    return None


def _strong_sort(pair: OrderPair, subset: Sequence[int]) -> list[int]:
    out = list(subset)
    out.sort(key=lambda e: sum(1 for f in subset if (f, e) in pair.strong.lt))
    return out


def check_dagger(pair: OrderPair, k: int) -> list[int] | None:
    """A finite strong chain whose weak restriction needs more than k chains
    to cover, or None; same search order as check_star."""
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    n = pair.weak.n
    if n > SUBSET_SEARCH_BOUND:
        raise ResourceError(f"carrier too large for subset search: {n}")
    for m in range(n):
        for combo in _subsets_lex(0, m):
            subset = combo + (m,)
            if not _is_strong_chain(pair, subset):
                continue
            if len(min_chain_cover(pair.weak.restrict(subset))) > k:
                return _strong_sort(pair, subset)
    return None


# ------------------------------------------------- closed-form witnesses


FAMILY_KINDS = ("prefix-vs-lexico", "lexico1-vs-lexico", "generic-search")


def family_posets(kind: str, symbols: tuple[str, str] = ("a", "b")):
    """The (weak, strong) word posets behind the closed-form families."""
    from .posets import parse_poset_spec

    x, y = symbols
    if kind == "prefix-vs-lexico":
        return (
            parse_poset_spec(f"prefix:{x}{y}"),
            parse_poset_spec(f"lexico:{x}<{y}"),
        )
    if kind == "lexico1-vs-lexico":
        return (
            parse_poset_spec(f"lexico:{x};{y}"),
            parse_poset_spec(f"lexico:{x}<{y}"),
        )
    raise ConfigError(f"no poset pair for family kind {kind!r}")


def chain_antichain_family(
    kind: str,
    size: int,
    symbols: tuple[str, str] = ("a", "b"),
    weak_spec: Optional[str] = None,
    strong_spec: Optional[str] = None,
    fragment_size: int = 16,
) -> list[str]:
    """A size-element strong chain that is a weak antichain.

    The closed-form kinds return {x^j y : j < size} in ascending strong
    order; generic-search builds a rank-bounded fragment of the given poset
    pair and runs check_star on it. Every returned family is re-verified
    before it is handed back.
    """
    if kind not in FAMILY_KINDS:
        raise ConfigError(f"kind must be one of {FAMILY_KINDS}, got {kind!r}")
    if size < 1:
        raise ConfigError(f"size must be >= 1, got {size}")
    if kind == "generic-search":
        if weak_spec is None or strong_spec is None:
            raise ConfigError("generic-search needs weak_spec and strong_spec")
        from .posets import parse_poset_spec

        weak_p = parse_poset_spec(weak_spec)
        strong_p = parse_poset_spec(strong_spec)
        pair, elems = order_pair_fragment(weak_p, strong_p, fragment_size)
        found = check_star(pair, size)
        if found is None:
            raise ResourceError(
                f"no size-{size} witness within the first {fragment_size} ranks"
            )
        family = [elems[i] for i in found]
    else:
        x, y = symbols
        weak_p, strong_p = family_posets(kind, symbols)
        family = [x * (size - 1 - j) + y for j in range(size)]
    for a, b in itertools.combinations(family, 2):
        if not strong_p.lt(a, b):
            raise VerificationError(f"family is not an ascending strong chain: {family}")
        if weak_p.leq(a, b) or weak_p.leq(b, a):
            raise VerificationError(f"family is not a weak antichain: {family}")
    return family


def order_pair_fragment(
    weak_p: PosetInstance, strong_p: PosetInstance, size: int
) -> tuple[OrderPair, list]:
    """The induced order pair on the first `size` ranks of a shared carrier;
    returns the pair together with the elements in rank order."""
    if size < 1:
        raise ConfigError(f"fragment size must be >= 1, got {size}")
    elems = [strong_p.unrank(i) for i in range(size)]
    for i, e in enumerate(elems):
        if weak_p.unrank(i) != e:
            raise ConfigError(
                "weak and strong posets do not share a carrier enumeration"
            )
    names = tuple(strong_p.format_elem(e) for e in elems)
    weak_lt = frozenset(
        (i, j)
        for i in range(size)
        for j in range(size)
        if weak_p.lt(elems[i], elems[j])
    )
    strong_lt = frozenset(
        (i, j)
        for i in range(size)
        for j in range(size)
        if strong_p.lt(elems[i], elems[j])
    )
    pair = OrderPair(
        FinitePoset(size, weak_lt, names), FinitePoset(size, strong_lt, names)
    )
    return pair, elems
