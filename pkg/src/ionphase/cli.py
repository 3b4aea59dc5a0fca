"""Command-line entry point: ``ionphase <subcommand> [options]``.

Exit codes: 0 success, 1 validation/usage error, 2 runtime or fit failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys

from .errors import (
    ConfigurationError,
    DomainError,
    InsufficientDataError,
    ParseError,
    ValidationError,
)
from .heterodyne import read_histogram_csv
from .phase_estimation import fit_cosine, format_fit_record
from .pipeline import (
    build_config,
    format_csv,
    parse_config,
    parse_corrections,
    simulate_sweep,
    theory_curve,
)

log = logging.getLogger("ionphase")

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _common(parser):
    parser.add_argument("--config", help="key = value config file (defaults for omitted keys)")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config)")
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    parser.add_argument(
        "--corrections",
        help="comma list of motion,saturation,sideband_reference, or 'all'/'none'",
    )
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = _Parser(prog="ionphase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("theory-curve", help="predicted phase and uncertainty band vs detuning")
    _common(p)

    p = sub.add_parser("simulate-sweep", help="theory plus simulated heterodyne measurements")
    _common(p)
    p.add_argument("--jobs", type=int, default=1, help="grid points simulated in parallel")

    p = sub.add_parser("fit", help="fit a TDC histogram CSV (bin_start_s,count)")
    _common(p)
    p.add_argument("histogram", help="histogram CSV path")
    p.add_argument("--beat-mhz", type=float, help="beat frequency / 2pi in MHz (default from config)")

    p = sub.add_parser("reproduce-fig3", help="default parameter set: theory band and simulated points")
    _common(p)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _load(args):
    config = parse_config(args.config) if args.config else build_config()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.corrections is not None:
        config = config.with_corrections(parse_corrections(args.corrections))
    return config


def _write(text, out):
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc


def _summary(rows):
    for r in rows:
        if abs(r.detuning_gamma + 0.5) < 1e-12:
            sim = "" if r.sim_deg is None else f", simulated {r.sim_deg:.2f} +- {r.sim_err_deg:.2f} deg"
            log.warning(
                "at -Gamma/2: theory %.3f deg (band %.3f..%.3f)%s",
                r.theory_deg, r.theory_lo_deg, r.theory_hi_deg, sim,
            )


def run(args) -> int:
    if args.command == "fit":
        config = _load(args)
        beat = (
            2.0 * math.pi * args.beat_mhz * 1e6
            if args.beat_mhz is not None
            else config.heterodyne.beat_frequency
        )
        hist = read_histogram_csv(args.histogram)
        _write(format_fit_record(fit_cosine(hist, beat)), args.out)
        return EXIT_OK

    if args.command == "reproduce-fig3":
        config = build_config()
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        if args.corrections is not None:
            config = config.with_corrections(parse_corrections(args.corrections))
        rows = simulate_sweep(config, jobs=args.jobs)
        _summary(rows)
    elif args.command == "theory-curve":
        rows = theory_curve(_load(args))
    else:
        rows = simulate_sweep(_load(args), jobs=args.jobs)
    _write(format_csv(rows), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    if args.command == "reproduce-fig3" and args.config:
        log.warning("reproduce-fig3 uses the built-in parameter set; --config ignored")
    try:
        return run(args)
    except (ParseError, ValidationError, ConfigurationError, DomainError, ValueError) as exc:
        print(f"ionphase: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InsufficientDataError, OSError, ArithmeticError) as exc:
        print(f"ionphase: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
