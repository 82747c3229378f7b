"""Command line front end.

Subcommands: `check` a model against formulas, `validate` a model file,
`gen` a benchmark instance, `ltl2dpa` a path formula, `solvepg` a parity
game file. `check` exits 0 when every formula holds on all initial
states, 1 when one does not, and 2 on any error; everything else exits
0 or 2. Output is deterministic byte for byte, so stdout can be diffed;
diagnostics that vary between runs (timings) go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List

from . import __version__
from .acgsio import parse_spec, read_model, write_model, write_spec
from .benchmarks import gen_bookstore, gen_castle, gen_dining, gen_figure1
from .engine import McStats, check
from .errors import AcgsError
from .formulas import Coalition, collect_state_subformulae, parse_formula, \
    parse_path_formula
from .gamecheck import build_game
from .ltl2dpa import ltl_to_dpa
from .model import validate
from .paritygame import ParityGame, format_game, parse_game, solve, \
    verify_winning_strategy


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


# -- check -------------------------------------------------------------------


def _cmd_check(args) -> int:
    m = read_model(args.model)
    if args.spec:
        formulas = parse_spec(_read(args.spec))
        if not formulas:
            raise ValueError("%s holds no formulas" % args.spec)
    else:
        formulas = [args.formula]
    if args.dump_game:
        _dump_game(args, m, formulas)

    records = []
    all_sat = True
    for text in formulas:
        stats = McStats() if args.stats else None
        verdict = check(m, text, algo=args.algo, budget=args.budget,
                        jobs=args.jobs, stats=stats)
        all_sat = all_sat and verdict.sat
        records.append((text, verdict))
        if stats is not None:
            print("stats: %r" % (stats,), file=sys.stderr)

    if args.json:
        payload = [{
            "formula": text,
            "sat": verdict.sat,
            "initial": {str(s): held for s, held
                        in sorted(verdict.by_initial.items(), key=str)},
            **({"states": sorted(verdict.states, key=str)}
               if args.states else {}),
        } for text, verdict in records]
        print(json.dumps({"model": args.model, "results": payload},
                         sort_keys=True, indent=2))
    else:
        for text, verdict in records:
            print("%s  %s" % ("SAT  " if verdict.sat else "UNSAT", text))
            if args.states:
                print("  holds in: %s"
                      % " ".join(str(s) for s in sorted(verdict.states, key=str)))
    return 0 if all_sat else 1


def _dump_game(args, m, formulas) -> None:
    """Write the parity game behind a single coalition formula, vertices
    renamed v0, v1, ... (construction order) with the originals in comments."""
    if len(formulas) != 1:
        raise ValueError("--dump-game needs exactly one formula")
    f = parse_formula(formulas[0])
    if not isinstance(f, Coalition) or collect_state_subformulae(f.body):
        raise ValueError("--dump-game needs one coalition formula "
                         "with a pure-LTL goal")
    start = args.dump_from
    if start is None:
        start = min(m.initial, key=m.index.get)
    elif start not in m.index:
        raise ValueError("unknown state %r" % start)
    g = build_game(m, f.agents, ltl_to_dpa(f.body), start, budget=args.budget)
    ids = {v: "v%d" % k for k, v in enumerate(g.owner)}
    renamed = ParityGame(
        {ids[v]: g.owner[v] for v in g.owner},
        {ids[v]: g.rank[v] for v in g.owner},
        {ids[v]: tuple(ids[t] for t in g.succ[v]) for v in g.owner})
    header = "".join("# %s = %r\n" % (ids[v], v) for v in g.owner)
    _write(args.dump_game, header + format_game(renamed))


# -- validate ----------------------------------------------------------------


def _cmd_validate(args) -> int:
    m = read_model(args.model)
    problems = validate(m)
    for msg in problems:
        print(msg)
    if problems:
        return 2
    print("ok: %d states, %d agents, %d transitions"
          % (len(m.states), len(m.agents), len(m.transitions)))
    return 0


# -- gen ---------------------------------------------------------------------


def _cmd_gen(args) -> int:
    ability = {}
    for kv in args.ability or []:
        name, _, tag = kv.partition("=")
        if not name or not tag:
            raise ValueError("--ability wants agent=TYPE, got %r" % kv)
        ability[name] = tag
    if args.family == "figure1":
        m, fs = gen_figure1((ability.get("a1", "IR"), ability.get("a2", "ir")))
    elif args.family == "dining":
        m, fs = gen_dining(args.n, abilities=ability or None)
    elif args.family == "castle":
        m, fs = gen_castle(args.workers, args.hp, abilities=ability or None)
    else:
        m, fs = gen_bookstore((ability.get("sup", "ir"),
                               ability.get("pur", "ir")))
    unknown = set(ability) - set(m.agents)
    if unknown:
        raise ValueError("unknown agent(s) in --ability: %s"
                         % ", ".join(sorted(unknown)))
    text = write_model(m)
    if args.out:
        _write(args.out + ".acgs", text)
        _write(args.out + ".spec", write_spec(fs))
        print("wrote %s.acgs and %s.spec" % (args.out, args.out))
    else:
        sys.stdout.write(text)
        for f in fs:
            print("# formula: %s" % f)
    return 0


# -- ltl2dpa -----------------------------------------------------------------


def _cmd_ltl2dpa(args) -> int:
    p = parse_path_formula(args.formula)
    props = tuple(args.props.split(",")) if args.props else None
    d = ltl_to_dpa(p, props=props)
    if args.json:
        delta = [[state, sorted(letter), target]
                 for (state, letter), target in d.delta.items()]
        delta.sort(key=lambda row: (row[0], row[1]))
        print(json.dumps({
            "props": list(d.props),
            "states": d.n,
            "initial": d.initial,
            "ranks": list(d.rank),
            "delta": delta,
        }, sort_keys=True, indent=2))
    else:
        print("states: %d" % d.n)
        print("props: %s" % " ".join(d.props))
        print("ranks: %s" % " ".join(str(r) for r in sorted(set(d.rank))))
    return 0


# -- solvepg -----------------------------------------------------------------


def _cmd_solvepg(args) -> int:
    g = parse_game(_read(args.game))
    regions = solve(g)
    if args.verify:
        broken = verify_winning_strategy(g, regions)
        if broken:
            for msg in broken:
                print(msg, file=sys.stderr)
            return 2
    if args.json:
        print(json.dumps({
            "win0": sorted(regions.win0),
            "win1": sorted(regions.win1),
            "strategy0": dict(sorted(regions.strategy0.items())),
            "strategy1": dict(sorted(regions.strategy1.items())),
        }, sort_keys=True, indent=2))
    else:
        print("player 0 wins: %s" % " ".join(sorted(regions.win0)))
        print("player 1 wins: %s" % " ".join(sorted(regions.win1)))
    return 0


# -- wiring ------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="acgs",
        description="model checking over game structures with per-agent "
                    "strategy abilities")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check formulas on a model file")
    p.add_argument("model", help=".acgs model file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("formula", nargs="?", help="formula text")
    group.add_argument("--spec", help=".spec file, one formula per line")
    p.add_argument("--algo", choices=("auto", "enum", "parity"),
                   default="auto")
    p.add_argument("--budget", type=int, default=10 ** 6,
                   help="largest strategy space either backend may enumerate")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker processes for the strategic backends "
                        "(default: all cores; pools only spawn for large "
                        "strategy spaces)")
    p.add_argument("--states", action="store_true",
                   help="also list every state where the formula holds")
    p.add_argument("--stats", action="store_true",
                   help="print work counters to stderr")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dump-game", metavar="FILE",
                   help="write the parity game for the (single, coalition) "
                        "formula before checking")
    p.add_argument("--dump-from", metavar="STATE",
                   help="game start state for --dump-game "
                        "(default: first initial state)")
    p.set_defaults(run=_cmd_check)

    p = sub.add_parser("validate", help="parse a model file and report "
                                        "structural problems")
    p.add_argument("model")
    p.set_defaults(run=_cmd_validate)

    p = sub.add_parser("gen", help="generate a benchmark instance")
    p.add_argument("family",
                   choices=("figure1", "dining", "castle", "bookstore"))
    p.add_argument("-n", type=int, default=3,
                   help="dining: number of cryptographers")
    p.add_argument("--workers", type=int, default=2, help="castle: workers")
    p.add_argument("--hp", type=int, default=1,
                   help="castle: hit points per castle")
    p.add_argument("--ability", action="append", metavar="AGENT=TYPE",
                   help="override an agent's ability (repeatable)")
    p.add_argument("-o", "--out", metavar="BASE",
                   help="write BASE.acgs and BASE.spec instead of stdout")
    p.set_defaults(run=_cmd_gen)

    p = sub.add_parser("ltl2dpa", help="compile a path formula to a "
                                       "deterministic parity automaton")
    p.add_argument("formula")
    p.add_argument("--props", help="comma-separated letter support")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=_cmd_ltl2dpa)

    p = sub.add_parser("solvepg", help="solve a parity game file")
    p.add_argument("game")
    p.add_argument("--verify", action="store_true",
                   help="re-check the winning strategies before printing")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=_cmd_solvepg)
    return top


def main(argv: List[str] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.run(args)
    except (AcgsError, OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
