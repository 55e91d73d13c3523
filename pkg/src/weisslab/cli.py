"""Command-line entry point: ``weisslab <experiment> [--config PATH] [--alpha X] [--seed N] [--out PATH]``.

Exit status: 0 pass, 1 assertion failure, 2 configuration error,
3 solver non-convergence.
"""
from __future__ import annotations

import argparse
import sys

from .experiments import (
    EXIT_CONFIG,
    EXPERIMENTS,
    ConfigError,
    build_config,
    run,
    thread_count,
    write_outputs,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="weisslab", description="Run a weighted-admissibility experiment.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="key = value file; its entries override the flags below")
    p.add_argument("--alpha", type=float, default=None, help="weight exponent")
    p.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    p.add_argument("--out", default=None, help="CSV path; a .json sidecar is written next to it")
    p.add_argument("--quiet", action="store_true", help="do not print the table")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    text = None
    try:
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc.strerror or exc}") from None
        flags = {"alpha": args.alpha, "seed": args.seed, "out": args.out}
        cfg = build_config(args.experiment, text, flags)
        threads = thread_count()
    except ConfigError as exc:
        print(f"weisslab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report = run(cfg, threads)
    csv_path, side = write_outputs(report, cfg.out)
    if not args.quiet:
        from .experiments import emit

        sys.stdout.write(emit(report, "csv").decode("ascii"))
    for chk in report.checks:
        mark = "PASS" if chk.passed else "FAIL"
        print(f"[{mark}] {chk.name}: {chk.detail}", file=sys.stderr)
    if not report.converged:
        print("weisslab: solver did not converge", file=sys.stderr)
    print(f"wrote {csv_path} and {side}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
