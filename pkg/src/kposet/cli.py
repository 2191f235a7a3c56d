"""Command-line front end.

Commands: estimate | quotient | conditions | dilworth | diagonal | bb
| cardre | interact. Tabular output is RFC-4180 CSV with '#'-prefixed
header lines carrying the full run configuration; structured witnesses are
JSON with the configuration embedded. Reports are byte-identical across
reruns with the same configuration and seed, and files are written once,
atomically. Exit codes: 0 success, 2 configuration error, 3 desk-scale
resource ceiling.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from typing import Optional

from . import analysis, automata, complexity, vm
from .codec import b_index
from .errors import ConfigError, DomainError, KposetError, ResourceError
from .limits import budgeted_limit
from .posets import parse_poset_spec, reverse

__all__ = ["main"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    poset: Optional[str] = None
    pair: Optional[str] = None
    max_len: Optional[int] = None
    fuel: Optional[int] = None
    t_budget: Optional[int] = None
    window: Optional[int] = None
    ranks: Optional[int] = None
    seed: int = 0
    threads: int = 1
    extra: Optional[dict] = None

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        extra = d.pop("extra", None)
        if extra:
            d.update(extra)
        return d


def _budget(cfg: RunConfig) -> complexity.Budget:
    return complexity.Budget(cfg.max_len, cfg.fuel, cfg.t_budget, cfg.window)


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".kposet-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        _write_atomic(out, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _split_pair(pair: str):
    parts = pair.split("/")
    if len(parts) != 2:
        raise ConfigError(
            f"--pair wants weak-spec/strong-spec, got {pair!r}"
        )
    return parse_poset_spec(parts[0]), parse_poset_spec(parts[1])


def _csv_report(config: RunConfig, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config.to_dict(), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_report(config: RunConfig, payload: dict) -> str:
    return json.dumps(
        {"config": config.to_dict(), **payload}, sort_keys=True, indent=2
    ) + "\n"


# ----------------------------------------------------------------- commands


def cmd_estimate(args) -> int:
    cfg = RunConfig(
        command="estimate", poset=args.poset, max_len=args.max_len,
        fuel=args.fuel, t_budget=args.t_budget, window=args.window,
        ranks=args.ranks, seed=args.seed, threads=args.threads,
    )
    p = parse_poset_spec(args.poset)
    text = complexity.hierarchy_report(
        p, args.ranks, _budget(cfg), config=cfg.to_dict(), threads=args.threads
    )
    _emit(text, args.out)
    return 0


def cmd_quotient(args) -> int:
    sigma = tuple(args.alphabet)
    ast = automata.parse_regex(args.regex, sigma)
    if ast is None:
        raise ConfigError(f"not a well-formed expression: {args.regex!r}")
    lang = automata.to_canonical_dfa(ast, sigma)
    words = args.m_words.split(",")
    for w in words:
        if any(c not in set(sigma) for c in w):
            raise ConfigError(f"quotient word {w!r} is not over {args.alphabet!r}")
    cfg = RunConfig(
        command="quotient", seed=args.seed, threads=args.threads,
        extra={"regex": args.regex, "alphabet": args.alphabet, "m_words": words},
    )
    e = automata.quotient_evaluator(lang, words)
    rows = []
    final = None
    for t in range(len(words)):
        handle = e(None, t, len(words))
        final = handle
        rows.append([t, automata.canonical_regex(handle.dfa)])
    rows.append(["final", automata.canonical_regex(final.dfa)])
    _emit(_csv_report(cfg, ["t", "quotient"], rows), args.out)
    return 0


def cmd_conditions(args) -> int:
    weak_p, strong_p = _split_pair(args.pair)
    cfg = RunConfig(
        command="conditions", pair=args.pair, seed=args.seed, threads=args.threads,
        extra={"k": args.k, "condition": args.condition, "fragment": args.fragment},
    )
    pair, elems = analysis.order_pair_fragment(weak_p, strong_p, args.fragment)
    if args.condition == "star":
        found = analysis.check_star(pair, args.k)
    else:
        found = analysis.check_dagger(pair, args.k)
    witness = None
    if found is not None:
        witness = [strong_p.format_elem(elems[i]) for i in found]
    _emit(_json_report(cfg, {"witness": witness}), args.out)
    return 0


def cmd_dilworth(args) -> int:
    try:
        with open(args.file) as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.file!r}: {exc}") from exc
    fp = analysis.FinitePoset.from_json(text)
    cfg = RunConfig(
        command="dilworth", seed=args.seed, threads=args.threads,
        extra={"file": os.path.basename(args.file)},
    )
    antichain = analysis.max_antichain(fp)
    cover = analysis.min_chain_cover(fp)
    payload = {
        "antichain": [fp.name_of(i) for i in antichain],
        "antichain_size": len(antichain),
        "chains": [[fp.name_of(i) for i in chain] for chain in cover],
        "cover_size": len(cover),
        "dilworth_equal": len(antichain) == len(cover),
    }
    _emit(_json_report(cfg, payload), args.out)
    return 0


def _diagonal_generator(weak_spec: str, strong_spec: str):
    """Closed-form family for the prefix/lexico pair, subset search otherwise."""
    if weak_spec.startswith("prefix:") and strong_spec.startswith("lexico:"):
        alphabet = weak_spec.split(":", 1)[1]
        expr = strong_spec.split(":", 1)[1]
        if len(alphabet) == 2 and expr == f"{alphabet[0]}<{alphabet[1]}":
            symbols = (alphabet[0], alphabet[1])
            return lambda i, size: analysis.chain_antichain_family(
                "prefix-vs-lexico", size, symbols=symbols
            )
    return lambda i, size: analysis.chain_antichain_family(
        "generic-search", size, weak_spec=weak_spec, strong_spec=strong_spec
    )


def cmd_diagonal(args) -> int:
    weak_spec, strong_spec = args.pair.split("/", 1) if "/" in args.pair else (None, None)
    weak_p, strong_p = _split_pair(args.pair)
    cfg = RunConfig(
        command="diagonal", pair=args.pair, max_len=args.max_len, fuel=args.fuel,
        t_budget=args.t_budget, window=args.window, seed=args.seed,
        threads=args.threads,
        extra={"i": args.i, "alpha_shift": args.alpha_shift},
    )
    generator = _diagonal_generator(weak_spec, strong_spec)
    f_elem, g_elem, audit = complexity.diagonal_hard(
        weak_p, strong_p, generator,
        lambda j: j + args.alpha_shift, args.i, _budget(cfg),
    )
    payload = {
        "f": strong_p.format_elem(f_elem),
        "g": strong_p.format_elem(g_elem),
        "audit": audit,
    }
    _emit(_json_report(cfg, payload), args.out)
    return 0


def cmd_bb(args) -> int:
    if args.states > vm.BB_STATE_BOUND:
        raise ResourceError(
            f"busy beaver enumeration is bounded at n <= {vm.BB_STATE_BOUND}"
        )
    cfg = RunConfig(
        command="bb", seed=args.seed, threads=args.threads,
        extra={"states": args.states, "t_max": args.t_max},
    )
    rows = []
    for n in range(args.states + 1):
        row = vm.busy_beaver_row(n, args.t_max)
        rows.extend([n, t, row[t]] for t in range(args.t_max + 1))
    _emit(_csv_report(cfg, ["n", "t", "bb"], rows), args.out)
    return 0


def _program_index(args) -> int:
    if args.program is not None:
        if any(c not in "01" for c in args.program):
            raise ConfigError("--program wants a binary word")
        return b_index(args.program)
    if args.index is not None:
        return args.index
    raise ConfigError("give --index or --program")


def cmd_cardre(args) -> int:
    n = _program_index(args)
    cfg = RunConfig(
        command="cardre", seed=args.seed, threads=args.threads,
        extra={"index": n, "t_max": args.t_max},
    )
    rows = [[t, vm.card_re(n, t)] for t in range(args.t_max + 1)]
    _emit(_csv_report(cfg, ["t", "count"], rows), args.out)
    return 0


def cmd_interact(args) -> int:
    n = _program_index(args)
    try:
        xs = tuple(sorted({int(v) for v in args.x.split(",") if v != ""}))
    except ValueError as exc:
        raise ConfigError(f"--x wants a comma-separated set of naturals: {exc}") from exc
    cfg = RunConfig(
        command="interact", t_budget=args.t_budget, window=args.window,
        seed=args.seed, threads=args.threads,
        extra={"mode": args.mode, "index": n, "x": list(xs)},
    )
    finsets = parse_poset_spec("finsets")
    order = reverse(finsets) if args.mode == "setminus" else finsets
    e = vm.set_interaction_evaluators(n, args.mode)
    trace = []
    prev = None
    for t in range(args.t_budget + 1):
        v = e(xs, t, args.t_budget)
        if v != prev:
            trace.append([t, list(v)])
            prev = v
    report = budgeted_limit(order, e, xs, args.t_budget, args.t_budget, args.window)
    payload = {
        "trace": trace,
        "limit": list(report.current) if report.current is not None else None,
        "status": report.status,
    }
    _emit(_json_report(cfg, payload), args.out)
    return 0


# -------------------------------------------------------------- arg parsing


def _add_common(sub, budget=True):
    sub.add_argument("--out", help="output file (atomic write); stdout otherwise")
    sub.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
    sub.add_argument(
        "--threads", type=int, default=os.cpu_count() or 1,
        help="worker pool cap for parallel enumeration",
    )
    if budget:
        sub.add_argument("--max-len", type=int, default=14, help="max program bits")
        sub.add_argument("--fuel", type=int, default=4096, help="machine steps per run")
        sub.add_argument("--t-budget", type=int, default=4096, help="approximation clock budget")
        sub.add_argument("--window", type=int, default=8, help="stability window")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kposet",
        description="desk-scale workbench for max/min program-size complexities "
        "over computable partially ordered sets",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    est = subs.add_parser("estimate", help="build the three-table CSV report")
    est.add_argument("--poset", required=True, help="poset spec, e.g. nat or prefix:ab")
    est.add_argument("--ranks", type=int, default=32, help="report rows 0..ranks-1")
    _add_common(est)
    est.set_defaults(fn=cmd_estimate)

    quo = subs.add_parser("quotient", help="stabilization trace of a language quotient")
    quo.add_argument("--regex", required=True)
    quo.add_argument("--alphabet", required=True)
    quo.add_argument("--m-words", required=True, help="comma-separated quotient words")
    _add_common(quo, budget=False)
    quo.set_defaults(fn=cmd_quotient)

    con = subs.add_parser("conditions", help="chain/antichain condition witnesses")
    con.add_argument("--pair", required=True, help="weak-spec/strong-spec")
    con.add_argument("--k", type=int, required=True)
    con.add_argument("--condition", choices=["star", "dagger"], default="star")
    con.add_argument("--fragment", type=int, default=15, help="carrier rank bound")
    _add_common(con, budget=False)
    con.set_defaults(fn=cmd_conditions)

    dil = subs.add_parser("dilworth", help="max antichain and min chain cover")
    dil.add_argument("--file", required=True, help="finite order JSON")
    _add_common(dil, budget=False)
    dil.set_defaults(fn=cmd_dilworth)

    dia = subs.add_parser("diagonal", help="diagonal hardness audit")
    dia.add_argument("--pair", required=True, help="weak-spec/strong-spec")
    dia.add_argument("--i", type=int, required=True)
    dia.add_argument("--alpha-shift", type=int, default=1, help="alpha(i) = i + shift")
    _add_common(dia)
    dia.set_defaults(fn=cmd_diagonal)

    bbp = subs.add_parser("bb", help="busy beaver table")
    bbp.add_argument("--states", type=int, required=True, help="n (machines have n+1 states)")
    bbp.add_argument("--t-max", type=int, required=True)
    _add_common(bbp, budget=False)
    bbp.set_defaults(fn=cmd_bb)

    car = subs.add_parser("cardre", help="enumerable-set counting table")
    car.add_argument("--index", type=int)
    car.add_argument("--program", help="program bits (alternative to --index)")
    car.add_argument("--t-max", type=int, required=True)
    _add_common(car, budget=False)
    car.set_defaults(fn=cmd_cardre)

    inter = subs.add_parser("interact", help="finite-set interaction trace")
    inter.add_argument("--mode", choices=list(vm.INTERACTION_MODES), required=True)
    inter.add_argument("--index", type=int)
    inter.add_argument("--program", help="program bits (alternative to --index)")
    inter.add_argument("--x", required=True, help="comma-separated finite set")
    inter.add_argument("--t-budget", type=int, default=256)
    inter.add_argument("--window", type=int, default=8)
    inter.add_argument("--out")
    inter.add_argument("--seed", type=int, default=0)
    inter.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    inter.set_defaults(fn=cmd_interact)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, DomainError) as exc:
        print(f"kposet: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"kposet: {exc}", file=sys.stderr)
        return 3
    except KposetError as exc:  # pragma: no cover - internal failures
        print(f"kposet: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
