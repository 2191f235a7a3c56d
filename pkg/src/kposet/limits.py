"""Approximation processes and budgeted limit operators.

An Evaluator is a deterministic budgeted partial map (x, t, fuel) -> value,
returning None when undefined within the fuel. Monotone-in-fuel is a caller
contract: a value returned at fuel F must be returned at every fuel >= F.
The t axis is the approximation clock; processes fed to ``budgeted_limit``
must be monotone increasing in t under the ambient order on their domain
(violations raise, they are never silently repaired; ``monotone_filter`` is
the explicit repair tool).

True convergence is undecidable, so limit reports never claim it: the best
status is stabilized-within-budget together with an explicit stability
window. Dovetailing everywhere uses one fixed diagonal order (increasing
coordinate sum, then increasing first coordinate) so runs are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence

from .errors import ConfigError, ContractError, MonotonicityError
from .posets import PosetInstance

__all__ = [
    "Trace",
    "Evaluator",
    "LimitReport",
    "STABILIZED",
    "STILL_CHANGING",
    "NO_VALUE",
    "budgeted_limit",
    "limit_report_from_trace",
    "monotone_filter",
    "normalize",
    "totalize",
    "prefix_normal_form",
    "split_by_distinct",
    "restrict_to_mixed_set",
    "common_value_dovetail",
    "trace_evaluator",
    "evaluator_from_json",
    "trace_to_csv",
]

STABILIZED = "stabilized-within-budget"
STILL_CHANGING = "still-changing"
NO_VALUE = "no-value"


@dataclass(frozen=True)
class Trace:
    """Materialized defined points of an approximation process at one input."""

    points: tuple[tuple[int, Any], ...]

    def __post_init__(self):
        ts = [t for t, _ in self.points]
        if any(t < 0 for t in ts) or any(a >= b for a, b in zip(ts, ts[1:])):
            raise ConfigError(f"trace clocks must be strictly increasing: {ts}")

    def values(self) -> list[Any]:
        return [d for _, d in self.points]


def trace_to_csv(p: PosetInstance, trace: Trace) -> str:
    return "\n".join(f"{t},{p.rank(d)}" for t, d in trace.points)


class Evaluator:
    """Wrapper giving a budgeted partial map a name and an optional domain hint."""

    def __init__(self, fn: Callable[[Any, int, int], Any], domain_hint=None, name: str = ""):
        self._fn = fn
        self.domain_hint = domain_hint
        self.name = name

    def __call__(self, x, t: int, fuel: int):
        if t < 0 or fuel < 0:
            raise ConfigError("t and fuel must be natural numbers")
        return self._fn(x, t, fuel)

    def __repr__(self):  # pragma: no cover
        return f"Evaluator({self.name or self._fn!r})"


def trace_evaluator(points: Iterable[tuple[int, Any]], cost: int = 0, name: str = "trace") -> Evaluator:
    """Synthetic evaluator defined exactly at the listed (t, value) points,
    at every input, once the fuel covers the per-point cost."""
    table = dict(points)

    def fn(x, t, fuel):
        if fuel < cost:
            return None
        return table.get(t)

    return Evaluator(fn, name=name)


def evaluator_from_json(p: PosetInstance, text: str) -> Evaluator:
    """Load the test fixture format {"points": [[t, rank], ...], "cost": c}."""
    data = json.loads(text)
    pts = [(int(t), p.unrank(int(r))) for t, r in data["points"]]
    return trace_evaluator(pts, cost=int(data.get("cost", 0)), name="json")


@dataclass(frozen=True)
class LimitReport:
    current: Optional[Any]
    last_change_t: int
    stable_for: int
    status: str


def budgeted_limit(
    p: PosetInstance,
    e: Evaluator | Callable[[Any, int, int], Any],
    x,
    t_budget: int,
    fuel: int,
    window: int,
) -> LimitReport:
    """Evaluate e(x, t, fuel) for t = 0..t_budget and report the current
    greatest value (equivalently the last defined one, by monotonicity).

    Status is stabilized-within-budget only when the final `window` defined
    points all carry the same value. Min-limits are this very function over
    reverse(p); there is no separate code path.
    """
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    current = None
    have = False
    last_t = 0
    last_change_t = 0
    tail_run = 0
    for t in range(t_budget + 1):
        d = e(x, t, fuel)
        if d is None:
            continue
        if have and d != current and not p.leq(current, d):
            raise MonotonicityError(
                f"process not monotone at t={t}",
                witness=((last_t, current), (t, d)),
            )
        if have and d == current:
            tail_run += 1
        else:
            current = d
            tail_run = 1
            last_change_t = t
        have = True
        last_t = t
    if not have:
        return LimitReport(None, 0, 0, NO_VALUE)
    status = STABILIZED if tail_run >= window else STILL_CHANGING
    return LimitReport(current, last_change_t, t_budget - last_change_t, status)


def limit_report_from_trace(
    trace: Sequence[tuple[int, Any]], t_budget: int, window: int
) -> LimitReport:
    """Fast path equivalent to budgeted_limit over an evaluator whose value at
    t is the last trace point with clock <= t (trace clocks strictly
    increasing, values strictly changing at each point)."""
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    pts = [(t, d) for t, d in trace if t <= t_budget]
    if not pts:
        return LimitReport(None, 0, 0, NO_VALUE)
    last_t, current = pts[-1]
    tail_run = t_budget - last_t + 1
    status = STABILIZED if tail_run >= window else STILL_CHANGING
    return LimitReport(current, last_t, t_budget - last_t, status)


def monotone_filter(
    p: PosetInstance, stream: Iterable[tuple[int, Any, int, Any]]
) -> list[tuple[int, Any, int, Any]]:
    """Keep the subsequence of (n, x, t, d) tuples whose graph is monotone
    increasing in t within every (n, x) group.

    A tuple is kept iff it is order-consistent with every previously KEPT
    tuple of its group in both time directions: earlier-kept values must lie
    below it, later-kept values above it. Checking both directions (rather
    than only t_j < t_i) is what makes the output genuinely monotone whatever
    the enumeration order; checking only against kept tuples is what keeps
    monotone streams untouched.
    """
    kept: list[tuple[int, Any, int, Any]] = []
    groups: dict[tuple[int, Any], list[tuple[int, Any]]] = {}
    seen_keys = set()
    for (n, x, t, d) in stream:
        key = (n, x, t)
        if key in seen_keys:
            raise ConfigError(f"stream repeats the cell {key!r}")
        seen_keys.add(key)
        ok = True
        for (tj, dj) in groups.get((n, x), ()):
            if tj < t and not p.leq(dj, d):
                ok = False
                break
            if tj > t and not p.leq(d, dj):
                ok = False
                break
        if ok:
            kept.append((n, x, t, d))
            groups.setdefault((n, x), []).append((t, d))
    return kept


def _greatest_of_chain(p: PosetInstance, values: Iterable[Any]) -> Any:
    best = None
    have = False
    for v in values:
        if not have:
            best, have = v, True
        elif p.leq(best, v):
            best = v
        elif not p.leq(v, best):
            raise MonotonicityError(
                "incomparable values in a supposed chain",
                witness=((0, best), (0, v)),
            )
    if not have:
        raise ContractError("empty value chain")
    return best


def normalize(p: PosetInstance, e: Evaluator) -> Evaluator:
    """Rectangular-domain form of a monotone process.

    The result is defined at (x, t) exactly when some (u, f) pair with
    u + f <= fuel makes e(x, u, f) converge (the dovetailed discovery of the
    first value theta(x)); its value is the greatest of {theta(x)} together
    with every e(x, u, t) converging within t steps for u <= t. Budgeted
    limits agree with the source wherever both stabilize.
    """
    theta_cache: dict[tuple[Any, int], Any] = {}

    def theta(x, fuel):
        # keyed by fuel too, so results never depend on earlier calls
        key = (x, fuel)
        if key in theta_cache:
            return theta_cache[key]
        value = None
        for s in range(fuel + 1):
            for u in range(s + 1):
                v = e(x, u, s - u)
                if v is not None:
                    value = v
                    break
            if value is not None:
                break
        theta_cache[key] = value
        return value

    def fn(x, t, fuel):
        first = theta(x, fuel)
        if first is None:
            return None
        delta = [first]
        for u in range(t + 1):
            v = e(x, u, t)
            if v is not None:
                delta.append(v)
        return _greatest_of_chain(p, delta)

    return Evaluator(fn, name=f"normalize({getattr(e, 'name', '')})")


def totalize(p: PosetInstance, e: Evaluator, bottom: Any) -> Evaluator:
    """Total form of a monotone process over an order with bottom element.

    Value at (x, t) is the greatest of {bottom} and every e(x, u, t)
    converging within t steps for u <= t; where e is total the budgeted
    limits agree.
    """

    def fn(x, t, fuel):
        vals = [bottom]
        for u in range(t + 1):
            v = e(x, u, t)
            if v is None:
                continue
            if not p.leq(bottom, v):
                raise ContractError(
                    f"value {v!r} is not above the declared bottom {bottom!r}"
                )
            vals.append(v)
        return _greatest_of_chain(p, vals)

    return Evaluator(fn, name=f"totalize({getattr(e, 'name', '')})")


def prefix_normal_form(f: Evaluator) -> Evaluator:
    """One-symbol-per-step form of a total prefix-monotone word process:
    output starts empty and each step extends the previous output by at most
    one symbol, without changing budgeted limits where both stabilize."""

    def fn(s, t, fuel):
        cur = ""
        prev_raw = None
        for u in range(1, t + 1):
            raw = f(s, u, fuel)
            if raw is None:
                raise ContractError("prefix_normal_form needs a total process")
            if prev_raw is not None and not raw.startswith(prev_raw):
                raise MonotonicityError(
                    "process is not prefix-monotone",
                    witness=((u - 1, prev_raw), (u, raw)),
                )
            prev_raw = raw
            cur = raw[: min(len(cur) + 1, len(raw))]
        return cur

    return Evaluator(fn, name=f"prefix_normal_form({getattr(f, 'name', '')})")


def split_by_distinct(trace: Trace, k: int) -> list[Any]:
    """The <= k distinct values of a bounded-height trace, in order of first
    appearance; their singletons partition the trace's value set."""
    out: list[Any] = []
    for _, d in trace.points:
        if d not in out:
            out.append(d)
            if len(out) > k:
                raise ConfigError(
                    f"trace has more than {k} distinct values"
                )
    return out


def restrict_to_mixed_set(
    p: PosetInstance,
    f_eval: Evaluator,
    r_pred: Callable[[Any, int], bool],
    s_pred: Callable[[Any, int], bool],
    gamma_bound: int = 10_000,
) -> Evaluator:
    """Restriction of a t-independent computation F to the mixed set
    {x : (exists t R(x,t)) and (forall t S(x,t))}.

    Three cases at (x, t): the value F(x) once F converged within t steps and
    R was seen while S never failed; the t-th iterate of the strictly
    increasing successor gamma applied to F(x) once S has failed; undefined
    otherwise. On the mixed set the budgeted limit is exactly F(x); once S
    fails the trace climbs forever and never stabilizes.

    gamma scans ranks for the first element strictly above its argument
    (memoized); exhausting the scan means the order has a maximal element
    within reach, which this construction does not support.
    """
    gamma_cache: dict[Any, Any] = {}

    def gamma(d):
        if d in gamma_cache:
            return gamma_cache[d]
        for rk in range(gamma_bound):
            e = p.unrank(rk)
            if p.lt(d, e):
                gamma_cache[d] = e
                return e
        raise ConfigError(
            f"no element strictly above {p.format_elem(d)} within rank {gamma_bound}"
        )

    def fn(x, t, fuel):
        fx = f_eval(x, 0, t)
        if fx is None:
            return None
        saw_r = any(r_pred(x, u) for u in range(t + 1))
        s_failed = any(not s_pred(x, u) for u in range(t + 1))
        if s_failed:
            cur = fx
            for _ in range(t):
                cur = gamma(cur)
            return cur
        if saw_r:
            return fx
        return None

    return Evaluator(fn, name="restrict_to_mixed_set")


def common_value_dovetail(
    p: PosetInstance,
    f: Evaluator,
    g: Evaluator,
    x_f,
    x_g,
    budget: int,
) -> Any | None:
    """Dovetail an increasing process f and a decreasing process g (monotone
    over reverse(p)) in diagonal (t, fuel) order and return the first value
    both produce; None when the budget exhausts first.

    When the inputs are max/min witnesses for the same element d, every
    defined f value sits below d and every defined g value above it, and the
    common value is d itself.
    """
    f_seen: set[Any] = set()
    g_seen: set[Any] = set()
    for s in range(budget + 1):
        for t in range(s + 1):
            fuel = s - t
            vf = f(x_f, t, fuel)
            if vf is not None:
                f_seen.add(vf)
                if vf in g_seen:
                    return vf
            vg = g(x_g, t, fuel)
            if vg is not None:
                g_seen.add(vg)
                if vg in f_seen:
                    return vg
    return None
