"""Command line: ``housemarket generate|solve|experiment|verify``."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from .experiment import emit_csv, emit_plot, load_config, parse_sizes, run_experiment, summarize
from .market import ark, mrk
from .procedures import PROCEDURES, solve
from .single_peaked import CULTURES, generate_instance
from .textformat import InstanceFormatError, format_instance, read_instance, write_instance
from .verify import SUITES, run_suite

log = logging.getLogger("housemarket")


def _fmt_alloc(alloc) -> str:
    return " ".join(map(str, alloc))


def cmd_generate(args) -> int:
    inst = generate_instance(args.n, args.culture, np.random.default_rng(args.seed), args.endow)
    if args.output == "-":
        sys.stdout.write(format_instance(inst))
    else:
        write_instance(inst, args.output)
    return 0


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    alloc, trace = solve(inst, args.procedure, args.seed)
    print(f"allocation: {_fmt_alloc(alloc)}")
    print(f"ark: {ark(inst, alloc)}  mrk: {mrk(inst, alloc)}  deals: {trace.num_deals}")
    if args.trace:
        for deal, after in trace.steps:
            print(f"  {deal!r} -> {_fmt_alloc(after)}")
    return 0


def cmd_experiment(args) -> int:
    config = load_config(args.config)
    output = args.output or config.output
    if output is None:
        raise SystemExit("experiment: no output path (use -o or 'output =' in the config)")
    rows = list(run_experiment(config))
    emit_csv(rows, output)
    log.info("wrote %d rows to %s", len(rows), output)
    if args.plots:
        for path in emit_plot(summarize(rows), args.plots):
            log.info("wrote %s", path)
    return 0


def cmd_verify(args) -> int:
    sizes = parse_sizes(args.sizes) if args.sizes else None
    report = run_suite(args.suite, sizes, args.reps, args.seed)
    for failure in report.failures:
        print(f"FAIL {failure.message}")
        if failure.instance is not None:
            print(format_instance(failure.instance))
    print(f"{report.suite}: {report.checks - len(report.failures)}/{report.checks} checks passed")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="housemarket", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a random single-peaked instance")
    p.add_argument("--culture", choices=CULTURES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--endow", choices=("identity", "random"), default="identity")
    p.add_argument("-o", "--output", default="-", help="instance file ('-' for stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run one procedure on an instance file")
    p.add_argument("--procedure", choices=PROCEDURES, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="print every deal")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="batch run from a config file, writing CSV")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--plots", help="directory for SVG charts")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="randomized property suites")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--sizes", help="start:stop[:step] or a list like '4,5,6'")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except InstanceFormatError as exc:
        print(f"error: {args.instance}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
