"""Command line entry point: ``qperc <kind> [flags]``, ``summarize``, ``verify``, ``snapshot``.

Exit codes: 0 success, 2 configuration error, 3 acceptance failure,
4 cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import hypercube as hc
from .config import KINDS, build_config, parse_d, read_config_file
from .errors import CapExceededError, ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_ACCEPTANCE, EXIT_CAP = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_run_flags(sp):
    sp.add_argument("--config", help="key = value file; flags override it")
    sp.add_argument("--d", type=parse_d, help="dimension: 12, 10,12,14 or 10:14:2")
    sp.add_argument("--epsilon", type=float, help="p = (1 + epsilon) / d")
    sp.add_argument("--p", type=float)
    sp.add_argument("--q2", type=float, help="sprinkle probability")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="CSV path (a gnuplot script is written next to it)")
    sp.add_argument("--workers", type=int, help="default: $QPERC_WORKERS or 1")
    sp.add_argument("--cap-exact", dest="cap_exact", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--record-time", dest="record_time", action="store_const", const=True,
                    help="fill wall_ms (breaks byte-identical reruns)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qperc", description="Percolation experiments on the hypercube.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for kind in KINDS:
        _add_run_flags(sub.add_parser(kind, help=f"run the {kind} experiment"))
    sm = sub.add_parser("summarize", help="per-metric statistics of a results CSV")
    sm.add_argument("csv")
    vf = sub.add_parser("verify", help="run the acceptance suite")
    vf.add_argument("--only", help="comma-separated criterion numbers")
    vf.add_argument("--json", action="store_true", help="machine-readable output")
    sn = sub.add_parser("snapshot", help="generate one graph and save it")
    sn.add_argument("--d", type=int, required=True)
    sn.add_argument("--p", type=float)
    sn.add_argument("--epsilon", type=float)
    sn.add_argument("--seed", type=int, default=0)
    sn.add_argument("--out", required=True)
    return ap


def _cmd_run(args) -> int:
    from .runner import run
    from .summary import summarize

    file_values = read_config_file(args.config) if args.config else {}
    keys = ("d", "epsilon", "p", "q2", "trials", "seed", "out", "workers", "cap_exact", "tol",
            "record_time")
    cfg = build_config(args.command, file_values, {k: getattr(args, k) for k in keys})
    records = run(cfg)
    for (exp, d, metric), st in summarize(records).items():
        std = "-" if st.std is None else f"{st.std:.6g}"
        print(f"{exp} d={d} {metric}: mean={st.mean:.6g} std={std} min={st.min:.6g} "
              f"max={st.max:.6g} n={st.n}")
    return EXIT_OK


def _cmd_summarize(args) -> int:
    from .runner import read_csv
    from .summary import summarize

    out = {f"{e}/d={d}/{m}": st.as_dict() for (e, d, m), st in summarize(read_csv(args.csv)).items()}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .acceptance import run_all

    numbers = None
    if args.only:
        try:
            numbers = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise ConfigError(f"--only: cannot parse {args.only!r}") from None
    results = []
    for res in run_all(numbers):
        results.append(res)
        if not args.json:
            print(res.line(), flush=True)
    if args.json:
        print(json.dumps([{"criterion": r.number, "title": r.title, "passed": r.passed,
                           "seconds": r.seconds, "measured": r.measured} for r in results],
                         indent=2, default=str))
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


def _cmd_snapshot(args) -> int:
    if (args.p is None) == (args.epsilon is None):
        raise ConfigError("give exactly one of --p and --epsilon")
    p = args.p if args.p is not None else (1 + args.epsilon) / args.d
    g = hc.generate(hc.GenerationParams(args.d, p, args.seed))
    hc.save_snapshot(g, args.out, args.seed)
    print(f"wrote {args.out}: d={g.d} edges={hc.edge_count(g)}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "summarize":
            return _cmd_summarize(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "snapshot":
            return _cmd_snapshot(args)
        return _cmd_run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
