"""The concrete, enumerable stand-in for partial computable functions.

A program is a raw bit string decoding left-to-right into two-counter
instructions (see OPCODES); any word that does not decode completely is
everywhere-divergent. Execution is deterministic; OUT proposes the element
of rank reg_a and the proposal is kept only when it extends the current
emission chain upward (equal re-emissions are deduplicated, downward or
incomparable proposals are silently skipped), so every program is a monotone
approximator. Min-semantics is obtained by running against the reversed
order, never by separate code.

Halting is decoupled from emitting: HALT only matters for the plain
(halting-value) semantics. Out-of-range jumps and fall-off-the-end enter a
dead spin that burns the remaining fuel. A repeat of the full machine state
(pc, reg_a, reg_b) proves divergence, so the interpreter cuts the run short
while reporting the fuel as consumed; kept and first-occurrence emissions
are unaffected.

The module also hosts the tiny Turing-machine class for the busy beaver
table and the enumerable-set counters built on raw emissions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional

from .codec import b_index, b_word
from .errors import ConfigError, DomainError, ResourceError
from .limits import Evaluator, Trace
from .posets import PosetInstance

__all__ = [
    "OPCODES",
    "parse_program",
    "assemble",
    "RunResult",
    "run_emitting",
    "run_raw",
    "vm_max_evaluator",
    "TmSpec",
    "enumerate_tm_specs",
    "busy_beaver_bb",
    "card_re",
    "set_interaction_evaluators",
    "BB_STATE_BOUND",
]

# 3-bit opcodes; JZ_A/JZ_B carry a 5-bit two's-complement relative offset
OPCODES = {
    "000": "INC_A",
    "001": "INC_B",
    "010": "DEC_A",
    "011": "DEC_B",
    "100": "JZ_A",
    "101": "JZ_B",
    "110": "OUT",
    "111": "HALT",
}
_MNEMONIC = {v: k for k, v in OPCODES.items()}

JUMP_MIN, JUMP_MAX = -16, 15


def parse_program(code: str) -> tuple[tuple[str, Optional[int]], ...] | None:
    """Decode a bit string into instructions; None when a trailing fragment
    cannot complete an instruction (the whole program then diverges)."""
    if any(c not in "01" for c in code):
        raise DomainError(f"not a binary word: {code!r}")
    out = []
    i = 0
    n = len(code)
    while i < n:
        if n - i < 3:
            return None
        op = OPCODES[code[i: i + 3]]
        i += 3
        if op in ("JZ_A", "JZ_B"):
            if n - i < 5:
                return None
            raw = int(code[i: i + 5], 2)
            off = raw - 32 if raw >= 16 else raw
            out.append((op, off))
            i += 5
        else:
            out.append((op, None))
    return tuple(out)


def assemble(instrs: Iterable[tuple[str, Optional[int]] | str]) -> str:
    """Inverse of parse_program; accepts ("JZ_A", off) pairs or bare mnemonics."""
    bits = []
    for ins in instrs:
        if isinstance(ins, str):
            op, arg = ins, None
        else:
            op, arg = ins
        if op not in _MNEMONIC:
            raise ConfigError(f"unknown mnemonic {op!r}")
        bits.append(_MNEMONIC[op])
        if op in ("JZ_A", "JZ_B"):
            if arg is None or not JUMP_MIN <= arg <= JUMP_MAX:
                raise ConfigError(f"jump offset out of range: {arg!r}")
            bits.append(format(arg & 0x1F, "05b"))
        elif arg is not None:
            raise ConfigError(f"{op} takes no argument")
    return "".join(bits)


@dataclass(frozen=True)
class RunResult:
    trace: tuple[tuple[int, Any], ...]  # kept emissions (step, element)
    raw_first: tuple[tuple[int, int], ...]  # first occurrence of each reg_a value
    halted: bool
    steps_used: int
    reg_a: int
    reg_b: int


_CYCLE_SET_CAP = 1 << 17  # beyond this, fall back to honest fuel burn


def _execute(instrs, input_b: int, fuel: int, unrank, leq) -> RunResult:
    pc, a, b = 0, 0, input_b
    steps = 0
    trace: list[tuple[int, Any]] = []
    raw_first: list[tuple[int, int]] = []
    raw_seen: set[int] = set()
    kept_last = None
    halted = False
    states: set[tuple[int, int, int]] = set()
    n = len(instrs)
    while steps < fuel:
        if pc < 0 or pc >= n:
            steps = fuel  # dead spin
            break
        key = (pc, a, b)
        if key in states:
            steps = fuel  # proven cycle, nothing new can happen
            break
        if len(states) < _CYCLE_SET_CAP:
            states.add(key)
        op, arg = instrs[pc]
        step_index = steps
        steps += 1
        if op == "INC_A":
            a += 1
            pc += 1
        elif op == "INC_B":
            b += 1
            pc += 1
        elif op == "DEC_A":
            a = max(0, a - 1)
            pc += 1
        elif op == "DEC_B":
            b = max(0, b - 1)
            pc += 1
        elif op == "JZ_A":
            pc = pc + arg if a == 0 else pc + 1
        elif op == "JZ_B":
            pc = pc + arg if b == 0 else pc + 1
        elif op == "OUT":
            if a not in raw_seen:
                raw_seen.add(a)
                raw_first.append((step_index, a))
            d = unrank(a)
            if kept_last is None:
                trace.append((step_index, d))
                kept_last = d
            elif d != kept_last and leq(kept_last, d):
                trace.append((step_index, d))
                kept_last = d
            pc += 1
        else:  # HALT
            halted = True
            break
    return RunResult(tuple(trace), tuple(raw_first), halted, steps, a, b)


def run_emitting(p: PosetInstance, code: str, input_b: int, fuel: int) -> RunResult:
    """Run a program with reg_a=0, reg_b=input_b under the kept-emission
    (max) filter for p; min semantics is run_emitting over reverse(p)."""
    if fuel < 0:
        raise ConfigError("fuel must be a natural number")
    instrs = parse_program(code)
    if instrs is None:
        return RunResult((), (), False, fuel, 0, input_b)
    return _execute(instrs, input_b, fuel, p.unrank, p.leq)


def run_raw(code: str, input_b: int, fuel: int) -> RunResult:
    """Run without any order (raw emissions only; the kept trace uses rank
    order on reg_a, which callers of raw data ignore)."""
    instrs = parse_program(code)
    if instrs is None:
        return RunResult((), (), False, fuel, 0, input_b)
    return _execute(instrs, input_b, fuel, lambda r: r, lambda x, y: x <= y)


def vm_max_evaluator(p: PosetInstance, n: int) -> Evaluator:
    """The n-th monotone process of the enumeration: program b_word(n) on
    input word x (passed through b_index), value at (x, t) = last kept
    emission within t machine steps. Defined only when fuel >= t so the
    fuel-monotonicity contract holds exactly.

    One run at the largest fuel seen per input is cached; the fuel-prefix
    property (the trace at fuel F is the step < F prefix of any longer run)
    makes slicing it exact for smaller fuels."""
    code = b_word(n)
    cache: dict[str, tuple[int, tuple[tuple[int, Any], ...]]] = {}

    def kept_trace(x: str, fuel: int):
        cached = cache.get(x)
        if cached is None or cached[0] < fuel:
            run_fuel = max(fuel, 64, 2 * cached[0] if cached else 0)
            cache[x] = (run_fuel, run_emitting(p, code, b_index(x), run_fuel).trace)
        run_fuel, trace = cache[x]
        if run_fuel == fuel:
            return trace
        return tuple((s, d) for s, d in trace if s < fuel)

    def fn(x, t, fuel):
        if fuel < t:
            return None
        value = None
        for step, d in kept_trace(x, fuel):
            if step > t:
                break
            value = d
        return value

    return Evaluator(fn, name=f"vm_max[{n} over {p.spec}]")


# ------------------------------------------------------------- busy beaver

BB_STATE_BOUND = 2  # largest n accepted by busy_beaver_bb (n+1 machine states)


@dataclass(frozen=True)
class TmSpec:
    """One-tape Turing machine over {blank, 1}; table maps (state, symbol)
    to (write, move, next) with next a state index or "H"."""

    states: int
    table: dict  # (q, s) -> (write, "L"/"R", next)

    def __post_init__(self):
        for q in range(self.states):
            for s in (0, 1):
                if (q, s) not in self.table:
                    raise ConfigError(f"transition table misses ({q},{s})")

    @staticmethod
    def from_json(data: dict) -> "TmSpec":
        try:
            states = int(data["states"])
            table = {}
            for key, val in data["table"].items():
                q, s = key.split(",")
                write, move, nxt = val
                table[(int(q), int(s))] = (
                    int(write),
                    str(move),
                    "H" if nxt == "H" else int(nxt),
                )
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad TmSpec JSON: {exc}") from exc
        return TmSpec(states, table)


def run_tm(spec: TmSpec, max_steps: int) -> tuple[bool, int, int]:
    """Run from blank tape; returns (halted, steps, cells_visited) where
    cells = distinct head positions including the final one after a halting
    move."""
    tape: dict[int, int] = {}
    pos = 0
    state: int | str = 0
    visited = {0}
    for step in range(1, max_steps + 1):
        write, move, nxt = spec.table[(state, tape.get(pos, 0))]
        tape[pos] = write
        pos += 1 if move == "R" else -1
        visited.add(pos)
        state = nxt
        if state == "H":
            return True, step, len(visited)
    return False, max_steps, len(visited)


def enumerate_tm_specs(states: int):
    """All total transition tables with the given number of states."""
    options = [
        (w, m, nxt)
        for w in (0, 1)
        for m in ("L", "R")
        for nxt in list(range(states)) + ["H"]
    ]
    keys = [(q, s) for q in range(states) for s in (0, 1)]
    for combo in itertools.product(options, repeat=len(keys)):
        yield TmSpec(states, dict(zip(keys, combo)))


def busy_beaver_bb(n: int, t: int) -> int:
    """Max over 0 and the cells visited by (n+1)-state machines halting
    within t steps from blank tape; monotone in both arguments."""
    if n < 0 or t < 0:
        raise ConfigError("busy_beaver_bb needs natural arguments")
    if n > BB_STATE_BOUND:
        raise ResourceError(
            f"busy beaver enumeration is bounded at n <= {BB_STATE_BOUND}"
        )
    best = 0
    for spec in enumerate_tm_specs(n + 1):
        halted, _, cells = run_tm(spec, t)
        if halted and cells > best:
            best = cells
    return best


def busy_beaver_row(n: int, t_max: int) -> list[int]:
    """bb(n, t) for t = 0..t_max in one enumeration pass."""
    if n > BB_STATE_BOUND:
        raise ResourceError(
            f"busy beaver enumeration is bounded at n <= {BB_STATE_BOUND}"
        )
    row = [0] * (t_max + 1)
    for spec in enumerate_tm_specs(n + 1):
        halted, steps, cells = run_tm(spec, t_max)
        if halted:
            for t in range(steps, t_max + 1):
                row[t] = max(row[t], cells)
    return row


# ------------------------------------------------- enumerable-set counters


def card_re(n: int, t: int) -> int:
    """h(n, t): distinct values emitted (unfiltered) by program b_word(n) on
    input 0 within t steps; the budgeted max-limit of h is the cardinality
    of the enumerated set when that set is finite."""
    if t < 0:
        raise ConfigError("t must be a natural number")
    res = run_raw(b_word(n), 0, t)
    return sum(1 for step, _ in res.raw_first if step < t)


def card_re_evaluator(n: int) -> Evaluator:
    cache: dict[int, RunResult] = {}

    def fn(x, t, fuel):
        if fuel < t:
            return None
        if fuel not in cache:
            cache[fuel] = run_raw(b_word(n), 0, fuel)
        return sum(1 for step, _ in cache[fuel].raw_first if step < t)

    return Evaluator(fn, name=f"card_re[{n}]")


INTERACTION_MODES = ("cap", "minus", "setminus")


def set_interaction_evaluators(a_index: int, mode: str) -> Evaluator:
    """The finite-set interaction processes against the set enumerated by
    program b_word(a_index) on input 0.

    cap:      X intersected with the values emitted so far (increasing)
    minus:    {x - y : x in X, y emitted, x >= y}          (increasing)
    setminus: X minus the values emitted so far            (decreasing;
              consume its limit with rev(finsets))
    """
    if mode not in INTERACTION_MODES:
        raise ConfigError(f"mode must be one of {INTERACTION_MODES}, got {mode!r}")
    code = b_word(a_index)
    cache: dict[int, RunResult] = {}

    def emitted(t: int, fuel: int) -> set[int]:
        if fuel not in cache:
            cache[fuel] = run_raw(code, 0, fuel)
        return {v for step, v in cache[fuel].raw_first if step < t}

    def fn(x, t, fuel):
        if fuel < t:
            return None
        xs = set(x)
        es = emitted(t, fuel)
        if mode == "cap":
            out = xs & es
        elif mode == "minus":
            out = {xx - y for xx in xs for y in es if xx >= y}
        else:
            out = xs - es
        return tuple(sorted(out))

    return Evaluator(fn, name=f"interact[{mode},{a_index}]")
