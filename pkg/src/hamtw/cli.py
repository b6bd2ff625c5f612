"""Command line: ``hamtw {solve,bench,tune,gen,stats}``.

Exit codes for ``solve``: 0 Hamiltonian, 1 not Hamiltonian, 2 timeout, 3 error.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

from . import bench as bench_mod
from .decomposition import min_fill_td, read_td_file
from .generator import GenParams, expected_params_report, generate, write_instance
from .graph import read_graph_file
from .solve import ALGORITHMS, ALIASES, MODES, prepare

log = logging.getLogger("hamtw")

EXIT_YES, EXIT_NO, EXIT_TIMEOUT, EXIT_ERROR = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the error code, not argparse's 2 (taken by timeouts)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_solver_flags(p: argparse.ArgumentParser, multi_algo: bool):
    if multi_algo:
        p.add_argument("--algo", nargs="+", default=list(ALGORITHMS),
                       choices=list(ALGORITHMS) + list(ALIASES), metavar="ALGO")
    else:
        p.add_argument("--algo", default="naive", choices=list(ALGORITHMS) + list(ALIASES))
    p.add_argument("--mode", default="auto", choices=MODES)
    p.add_argument("--timeout", type=float, default=None,
                   help="seconds per run (default 600, or 1800 above width 8)")
    p.add_argument("--seed", type=int, default=None, help="Cut&Count weight seed")
    p.add_argument("--tau", nargs="*", default=[], metavar="L=V",
                   help="per-size reduce thresholds, e.g. --tau 4=3 6=5")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--csv", default=None, help="write CSV here (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hamtw", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="decide one instance")
    p.add_argument("--input", required=True)
    p.add_argument("--td", default=None, help="PACE .td file (default: min-fill)")
    p.add_argument("--witness-out", default=None, help="write the cycle, one vertex per line")
    _add_solver_flags(p, multi_algo=False)

    p = sub.add_parser("bench", help="run algorithms over a suite directory")
    p.add_argument("--input", required=True, help="directory of .gr files (+ optional .td)")
    _add_solver_flags(p, multi_algo=True)

    p = sub.add_parser("tune", help="sweep rank-policy thresholds over a suite")
    p.add_argument("--input", required=True)
    p.add_argument("--sweep", choices=("tau", "alpha"), default="tau")
    p.add_argument("--grid", nargs="*", default=None,
                   help="alpha values, or L=V1,V2,... per size for tau")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--mode", default="decision", choices=MODES)
    p.add_argument("--csv", default=None)

    p = sub.add_parser("gen", help="generate planted-cycle instances")
    p.add_argument("-a", type=int, required=True, help="rows, 2 mod 4")
    p.add_argument("-b", type=int, required=True, help="columns")
    p.add_argument("-p", type=float, required=True, help="chord probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--name", default=None)
    p.add_argument("--min-fill", action="store_true",
                   help="write a min-fill decomposition instead of the constructive one")

    p = sub.add_parser("stats", help="graph statistics for a suite directory")
    p.add_argument("--input", required=True)
    p.add_argument("--csv", default=None)
    return parser


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_solve(args) -> int:
    tau = bench_mod.parse_tau(args.tau)
    g = read_graph_file(args.input)
    td = read_td_file(args.td) if args.td else None
    width = prepare(g, td).width
    timeout = args.timeout if args.timeout is not None else bench_mod.default_timeout(width)
    opts = dict(algorithm=args.algo, mode=args.mode, seed=args.seed, tau=tau or None,
                alpha=args.alpha)
    status, payload, secs = bench_mod.run_timed(args.input, args.td, timeout, **opts)
    rec = bench_mod.record_from(args.input, args.algo, args.mode, status, payload, secs,
                                timeout, opts)
    rec.width = width
    if args.csv:
        with _output(args.csv) as fh:
            bench_mod.CsvSink(fh, bench_mod.RECORD_FIELDS, bench_mod.CSV_VERSION).row(
                bench_mod.record_row(rec))
    print(f"{rec.outcome} algo={rec.algorithm} mode={rec.mode} width={rec.width} "
          f"time_ms={rec.wall_ms} peak={rec.peak_table} calls={rec.decision_calls}"
          + (f" note={rec.note}" if rec.note else ""))
    if status == "timeout":
        return EXIT_TIMEOUT
    if status == "error":
        return EXIT_ERROR
    if payload.hamiltonian and args.witness_out:
        if payload.cycle is None:
            log.warning("no cycle available in %s mode; witness file not written", rec.mode)
        else:
            with open(args.witness_out, "w") as fh:
                fh.write("".join(f"{v}\n" for v in payload.cycle))
    return EXIT_YES if payload.hamiltonian else EXIT_NO


def cmd_bench(args) -> int:
    tau = bench_mod.parse_tau(args.tau)
    with _output(args.csv) as fh:
        try:
            records = bench_mod.bench(args.input, args.algo, fh, timeout=args.timeout,
                                      mode=args.mode, seed=args.seed, tau=tau or None,
                                      alpha=args.alpha)
        except bench_mod.BenchDisagreement as exc:
            log.error("%s", exc)
            return EXIT_ERROR
    print(bench_mod.summary_text(records), file=sys.stderr)
    return 0


def _parse_grid(sweep: str, items):
    if not items:
        return None
    if sweep == "alpha":
        return [float(x) for x in items]
    grid = {}
    for item in items:
        key, _, vals = item.partition("=")
        grid[int(key)] = [int(v) for v in vals.split(",") if v]
    return grid


def cmd_tune(args) -> int:
    with _output(args.csv) as fh:
        try:
            bench_mod.tune(args.input, args.sweep, _parse_grid(args.sweep, args.grid), fh,
                           timeout=args.timeout, mode=args.mode)
        except bench_mod.BenchDisagreement as exc:
            log.error("%s", exc)
            return EXIT_ERROR
    return 0


def cmd_gen(args) -> int:
    for k in range(args.count):
        params = GenParams(args.a, args.b, args.p, args.seed + k)
        inst = generate(params)
        if args.min_fill:
            inst.td = min_fill_td(inst.graph)
        name = args.name or f"setE_a{args.a}_b{args.b}_s{params.seed}"
        if args.name and args.count > 1:
            name = f"{args.name}_{k}"
        paths = write_instance(inst, args.out, name)
        rep = expected_params_report(params)
        print(f"{paths['gr']}: n={inst.graph.n} m={inst.graph.m} "
              f"expected_m={rep['expected_edges']:.1f} width={inst.td.width}")
    return 0


def cmd_stats(args) -> int:
    with _output(args.csv) as fh:
        bench_mod.stats_rows(args.input, fh)
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "tune": cmd_tune, "gen": cmd_gen,
            "stats": cmd_stats}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
