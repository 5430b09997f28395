"""Command line entry point: ``monkeyfold simulate | evaluate | analyze``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime or data
error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import pipeline
from .config import ConfigError, load_config
from .objective import PRESETS
from .structio import PDBParseError

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="monkeyfold", description="Simulate C-alpha protein conformations with Monkey Search.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run a batch of simulations")
    s.add_argument("--config", help="key = value configuration file")
    s.add_argument("--preset", help=f"weight preset(s): {', '.join(PRESETS)}, comma list or all")
    s.add_argument("--count", type=int, help="simulations per weight triplet")
    s.add_argument("--seed", type=int, help="base seed; simulation k uses seed + k")
    s.add_argument("--out", help="output directory")
    s.add_argument("--workers", type=int, help="parallel worker processes")

    e = sub.add_parser("evaluate", help="RMSD of simulated conformations against targets")
    e.add_argument("--conf", required=True, help="directory of simulated .pdb files")
    e.add_argument("--targets", required=True, help="directory of target .pdb files")
    e.add_argument("--chains", required=True, help="file of '<target id> <chain>' lines")
    e.add_argument("--out", required=True, help="report CSV path")
    e.add_argument("--th", type=float, default=4.30)
    e.add_argument("--c", type=float, default=5.50)

    a = sub.add_parser("analyze", help="objective terms and geometry of one conformation")
    a.add_argument("file")
    a.add_argument("--th", type=float, default=4.30)
    a.add_argument("--c", type=float, default=5.50)
    a.add_argument("--preset", default="test2", choices=sorted(PRESETS))
    return p


def _simulate(args):
    overrides = {"preset": args.preset, "count": args.count, "seed": args.seed,
                 "out_dir": args.out, "workers": args.workers}
    config = load_config(args.config, overrides)
    records = pipeline.simulate(config)
    for r in records:
        print(f"{r.id}  seed={r.seed}  f={r.value:.4f}  thickness={r.thickness:.3f}  "
              f"helix_triplets={r.helix_triplets}  clashes={r.clash_pairs}  trees={r.trees}  "
              f"time={r.wall_time:.1f}s")
    print(f"wrote {len(records)} conformations to {config.out_dir if args.out is None else args.out}")


def _evaluate(args):
    report = pipeline.evaluate(args.conf, args.targets, args.chains, args.out, th=args.th, c=args.c)
    for msg in report.errors:
        print(f"warning: {msg}", file=sys.stderr)
    print(f"{'target':10s} {'count':>5s} {'min':>8s} {'mean':>8s} {'max':>8s}")
    for t, (cnt, lo, mean, hi) in report.aggregates().items():
        if cnt:
            print(f"{t:10s} {cnt:5d} {lo:8.3f} {mean:8.3f} {hi:8.3f}")
        else:
            print(f"{t:10s} {cnt:5d}        -        -        -")
    for conf, best in report.best_targets().items():
        if best is not None:
            print(f"{conf}: closest target {best[1]} (RMSD {best[0]:.3f})")
    print(f"report written to {args.out}")


def _analyze(args):
    stats = pipeline.analyze(args.file, th=args.th, c=args.c, weights=PRESETS[args.preset])
    print(pipeline.format_analysis(stats, th=args.th))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"simulate": _simulate, "evaluate": _evaluate, "analyze": _analyze}[args.command]
    try:
        handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PDBParseError, pipeline.DataError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
