"""Command-line entry point: ``curvform analyze ...``.

Exit codes: 0 success, 2 engine failure (every point failed, or any point
under ``--strict``), 3 configuration error.
"""
from __future__ import annotations

import argparse
import sys

from .analysis import AnalysisConfig, ConfigError, EngineError, analyze
from .classify import DEFAULT_TOLS, Tolerances
from .report import dumps, render_text

EXIT_OK, EXIT_ENGINE, EXIT_CONFIG = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise argparse.ArgumentTypeError(f"expected K=V, got {text!r}")
    return key.strip(), value.strip()


def _point(text: str):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvform", description="Pointwise curvature classification of metric charts.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    a = sub.add_parser("analyze", help="sample points and classify the curvature")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--metric", help="catalog metric name")
    src.add_argument("--chart-file", help="path of a chart file")
    a.add_argument("--param", action="append", type=_param, default=[], metavar="K=V",
                   help="metric parameter; an expression for met1's f and h, a real for chart params")
    a.add_argument("--samples", type=int, default=8)
    a.add_argument("--point", action="append", type=_point, default=[], metavar="V1,V2,...",
                   help="explicit sample point (repeatable, overrides sampling)")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--accept-tol", type=float, default=DEFAULT_TOLS.accept)
    a.add_argument("--reject-tol", type=float, default=DEFAULT_TOLS.reject)
    a.add_argument("--floor", type=float, default=DEFAULT_TOLS.floor, help="determinacy floor")
    a.add_argument("--format", choices=("json", "text"), default="json")
    a.add_argument("--strict", action="store_true", help="fail on any per-point engine error")
    a.add_argument("--workers", type=int, default=4)
    return parser


def config_from_args(args) -> AnalysisConfig:
    try:
        tols = Tolerances(accept=args.accept_tol, reject=args.reject_tol, floor=args.floor)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return AnalysisConfig(metric=args.metric, chart_file=args.chart_file, params=dict(args.param),
                          samples=args.samples, points=tuple(args.point), seed=args.seed, tols=tols,
                          strict=args.strict, workers=max(1, args.workers))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = analyze(config_from_args(args))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    for fail in report["failures"]:
        print(f"warning: point skipped: {fail['error']}", file=sys.stderr)
    sys.stdout.write(dumps(report) if args.format == "json" else render_text(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
