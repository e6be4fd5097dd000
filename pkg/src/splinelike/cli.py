"""``interp`` command-line entry point.

Exit status: 0 success, 1 an audit verdict failed, 2 bad configuration,
3 a numerical tolerance could not be met.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import conditions, experiments
from .errors import AccuracyError, ConfigError, DomainError

EXIT_OK = 0
EXIT_AUDIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3


def _number(text: str) -> float:
    return experiments._parse_number(text)


def _grid(text: str) -> tuple[float, ...]:
    return tuple(_number(t) for t in experiments._parse_list(text))


def build_parser() -> argparse.ArgumentParser:
    # argparse itself exits with 2 on bad flags, matching EXIT_CONFIG
    parser = argparse.ArgumentParser(prog="interp", description=(
        "Cardinal interpolation experiments: convergence of fundamental "
        "functions to sinc, recovery of band-limited functions, and audits "
        "of the family conditions."))
    parser.add_argument("command", choices=experiments.COMMANDS)
    parser.add_argument("--config", help="flat key = value settings file; flags win")
    parser.add_argument("--family", choices=experiments.FAMILIES)
    parser.add_argument("--families", type=lambda s: tuple(experiments._parse_list(s)),
                        help="comma-separated families for audit (may be empty)")
    parser.add_argument("--param-grid", dest="param_grid", type=_grid,
                        help="comma-separated escalation values, strictly increasing")
    parser.add_argument("--p", type=_number, help="norm order, 1..inf (default 2)")
    parser.add_argument("--window", type=_number, help="half-width T of [-T, T] (default 10)")
    parser.add_argument("--step", type=_number, help="grid step h, e.g. 1/16 (default)")
    parser.add_argument("--target", type=_number, help="absolute error target for L")
    parser.add_argument("--c", type=_number, help="fixed mq1 shape (default 1)")
    parser.add_argument("--a", type=_number, help="fixed mq2 exponent (default 1/2)")
    parser.add_argument("--function", choices=experiments.FUNCTIONS,
                        help="recovery target (default sinc_shift)")
    parser.add_argument("--omega", type=_number, help="cosine frequency, |omega| < pi")
    parser.add_argument("--shift", type=_number, help="sinc_shift offset")
    parser.add_argument("--support", type=int, help="sample support K, |k| <= K")
    parser.add_argument("--jobs", type=int, help="worker threads (default 1)")
    parser.add_argument("--out", help="CSV output path; stdout if omitted")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        experiments.write_atomic(out, text)
    else:
        sys.stdout.write(text)


def run(cfg: experiments.ExperimentConfig) -> int:
    if cfg.command == "convergence":
        rows = experiments.run_convergence(cfg)
        _emit(experiments.rows_to_csv(
            experiments.CONVERGENCE_HEADER,
            [(r.param, r.distance, r.tail_bound) for r in rows]), cfg.out)
        for r in rows:
            print(f"{cfg.family} {r.param:g}: distance {r.distance:.6g} "
                  f"(tail <= {r.tail_bound:.3g})", file=sys.stderr)
        return EXIT_OK
    if cfg.command == "recovery":
        rows = experiments.run_recovery(cfg)
        _emit(experiments.rows_to_csv(
            experiments.RECOVERY_HEADER,
            [(r.param, r.sup_error, r.truncation) for r in rows]), cfg.out)
        for r in rows:
            print(f"{cfg.family} {r.param:g}: sup error {r.sup_error:.6g} "
                  f"(support change {r.truncation:.3g})", file=sys.stderr)
        return EXIT_OK
    reports = experiments.run_audit(cfg)
    _emit(conditions.reports_to_csv(reports), cfg.out)
    for rep in reports:
        print(f"{rep.condition} {rep.family}: {rep.verdict}", file=sys.stderr)
        for note in rep.notes:
            print(f"    {note}", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_AUDIT_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        entries = experiments.read_config_file(args.config) if args.config else {}
        flags = {k: v for k, v in vars(args).items() if k != "config"}
        cfg = experiments.build_config(entries, **flags)
        return run(cfg)
    except ConfigError as exc:
        print(f"interp: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AccuracyError as exc:
        print(f"interp: tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except DomainError as exc:
        print(f"interp: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
