"""Command-line front end: ``compute``, ``bench``, ``tags`` and ``gen``.

Results go to stdout, logs to stderr.  Exit status is 0 on success, 1
for usage and input errors and 2 for a degenerate curve under
``--strict``.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import List, NoReturn, Optional, Sequence

from pydantic import ValidationError

from ropelength.config import settings
from ropelength.core import metrics
from ropelength.core.exceptions import (
    DegenerateCurveError,
    InvalidInputError,
    RopelengthError,
)
from ropelength.core.logging import curve_context, get_logger, setup_logging
from ropelength.schemas.curve import Poca, PolyCurve
from ropelength.schemas.knotgen import CurveFamily, GenSpec
from ropelength.schemas.search import BenchRow, SearchOptions, SearchReport
from ropelength.services.knotgen import generate
from ropelength.services.spatial_index import format_tag_table
from ropelength.services.thickness import thickness
from ropelength.utils.curve_file import format_curve, read_curve, write_curve

logger = get_logger(__name__)

FAMILIES = [f.value for f in CurveFamily]


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as exit status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise InvalidInputError(message)


# ------------------------------------------------------------------
# Argument parsing
# ------------------------------------------------------------------


def _add_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("path", nargs="?", help="Curve file to read")
    parser.add_argument("--family", choices=FAMILIES, help="Generate a curve instead")
    parser.add_argument("--n", type=int, help="Edge count for --family")
    parser.add_argument("--seed", type=int, default=0, help="Seed for random families")
    parser.add_argument("--step", type=float, default=1.0, help="Random-walk step")
    parser.add_argument("--side", type=float, default=1.0, help="Polygon side length")


def _add_search(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--levels", type=int, help="Octree levels (default ⌈¾ log₂ n⌉)")
    parser.add_argument(
        "--depth-1", dest="depth_1", action="store_true", help="Check every edge pair"
    )
    parser.add_argument("--tol", type=float, help="Relative tolerance")
    parser.add_argument(
        "--seed-cutoff", action="store_true", help="Start the cutoff at 2·minRad"
    )
    parser.add_argument(
        "--all-minima", action="store_true", help="Also report every local minimum"
    )
    parser.add_argument("--parallel", action="store_true", help="Search on threads")
    parser.add_argument("--workers", type=int, help="Thread count for --parallel")


def build_parser() -> argparse.ArgumentParser:
    """Return the top-level parser with all subcommands."""
    parser = _Parser(prog="ropelength", description=__doc__.splitlines()[0])
    parser.add_argument("--debug", action="store_true", help="Console logs at DEBUG")
    parser.add_argument("--metrics-file", help="Write Prometheus metrics here on exit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    compute = commands.add_parser("compute", help="Thickness and ropelength of a curve")
    _add_source(compute)
    _add_search(compute)
    compute.add_argument("--all-pocas", action="store_true", help="List shortest POCAs")
    output = compute.add_mutually_exclusive_group()
    output.add_argument("--csv", action="store_true", help="Print one CSV row")
    output.add_argument("--json", action="store_true", help="Print the full report")
    compute.add_argument(
        "--strict", action="store_true", help="Fail on zero thickness (exit 2)"
    )

    bench = commands.add_parser("bench", help="Octree vs. depth-1 timing sweep")
    bench.add_argument("family", choices=FAMILIES)
    bench.add_argument("--sizes", type=int, nargs="+", help="Explicit edge counts")
    bench.add_argument("--n-min", type=int, default=64)
    bench.add_argument("--n-max", type=int, default=4096)
    bench.add_argument("--reps", type=int, help="Fixed repetitions per cell")
    bench.add_argument("--seed", type=int, default=0)
    _add_search(bench)

    tags = commands.add_parser("tags", help="Per-edge octal tag table")
    _add_source(tags)
    tags.add_argument("--levels", type=int)

    gen = commands.add_parser("gen", help="Write a generated curve file")
    gen.add_argument("family", choices=FAMILIES)
    gen.add_argument("n", type=int, nargs="?")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--step", type=float, default=1.0)
    gen.add_argument("--side", type=float, default=1.0)
    gen.add_argument("-o", "--output", help="Destination file (stdout if omitted)")
    return parser


def _gen_spec(family: str, n: Optional[int], seed: int, step: float, side: float) -> GenSpec:
    try:
        return GenSpec(family=family, n=n, seed=seed, step=step, side=side)
    except ValidationError as exc:
        raise InvalidInputError(exc.errors()[0]["msg"])


def _load(args: argparse.Namespace) -> tuple[str, PolyCurve]:
    if (args.path is None) == (args.family is None):
        raise InvalidInputError("give either a curve file or --family")
    if args.path is not None:
        return Path(args.path).stem, read_curve(args.path)
    spec = _gen_spec(args.family, args.n, args.seed, args.step, args.side)
    return spec.label, generate(spec)


def _options(args: argparse.Namespace, levels: Optional[int]) -> SearchOptions:
    fields = dict(
        levels=levels,
        seed_cutoff=args.seed_cutoff,
        report_all_minima=args.all_minima,
        parallel=args.parallel,
        workers=args.workers,
    )
    if args.tol is not None:
        fields["tol"] = args.tol
    try:
        return SearchOptions(**fields)
    except ValidationError as exc:
        raise InvalidInputError(exc.errors()[0]["msg"])


# ------------------------------------------------------------------
# Output helpers
# ------------------------------------------------------------------


def _format_poca(poca: Poca) -> str:
    a, b = poca.a, poca.b
    return (
        f"poca {a.component} {a.edge} {a.t!r}  "
        f"{b.component} {b.edge} {b.t!r}  {poca.length!r}"
    )


def format_report(report: SearchReport, all_pocas: bool = False) -> str:
    """Human-readable report, one ``key value`` pair per line."""
    rows = [
        ("edges", report.n),
        ("algorithm", report.algorithm.value),
        ("levels", report.levels),
        ("capacity", report.capacity),
        ("min_rad", repr(report.min_rad)),
        ("poca_length", repr(report.poca_length)),
        ("thickness", repr(report.thickness)),
        ("length", repr(report.length)),
        ("ropelength", repr(report.ropelength)),
        ("edge_edge_checks", report.counters.edge_edge_checks),
        ("box_ramp_checks", report.counters.box_ramp_checks),
        ("box_distance_checks", report.counters.box_distance_checks),
        ("elapsed_seconds", f"{report.elapsed:.6f}"),
        ("status", report.status.value),
        ("pocas", len(report.pocas)),
    ]
    lines = [f"{key:<20} {value}" for key, value in rows]
    if all_pocas:
        lines.extend(_format_poca(p) for p in report.pocas)
    if report.all_pocas is not None:
        lines.append(f"{'local_minima':<20} {len(report.all_pocas)}")
        lines.extend(_format_poca(p) for p in report.all_pocas)
    return "\n".join(lines) + "\n"


def format_csv(rows: Sequence[BenchRow]) -> str:
    """CSV text with the fixed header followed by *rows*."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(BenchRow.COLUMNS)
    for row in rows:
        writer.writerow(row.as_csv_fields())
    return buffer.getvalue()


# ------------------------------------------------------------------
# Commands
# ------------------------------------------------------------------


def cmd_compute(args: argparse.Namespace) -> int:
    label, curve = _load(args)
    options = _options(args, 1 if args.depth_1 else args.levels)
    with curve_context(label, curve.edge_count):
        report = thickness(curve, options)
    if report.degenerate:
        print("warning: curve has zero thickness", file=sys.stderr)
        if args.strict:
            raise DegenerateCurveError(
                details={"min_rad": report.min_rad, "poca_length": report.poca_length}
            )
    if args.csv:
        sys.stdout.write(format_csv([BenchRow.from_report(label, report, [report.elapsed])]))
    elif args.json:
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    else:
        sys.stdout.write(format_report(report, all_pocas=args.all_pocas))
    return 0


def _bench_sizes(args: argparse.Namespace) -> List[int]:
    if args.sizes:
        return list(args.sizes)
    if args.n_min < 1 or args.n_max < args.n_min:
        raise InvalidInputError("need 1 <= --n-min <= --n-max")
    sizes = []
    n = args.n_min
    while n <= args.n_max:
        sizes.append(n)
        n *= 2
    return sizes


def timed_runs(
    curve: PolyCurve, options: SearchOptions, reps: Optional[int] = None
) -> tuple[SearchReport, List[float]]:
    """Repeat a thickness computation and collect elapsed times.

    Without *reps*, ``BENCH_MIN_REPS`` runs are made, topped up to
    ``BENCH_FAST_REPS`` when their mean is under
    ``BENCH_FAST_THRESHOLD_S`` seconds.
    """
    count = reps or settings.BENCH_MIN_REPS
    report = thickness(curve, options)
    elapsed = [report.elapsed]
    while len(elapsed) < count:
        elapsed.append(thickness(curve, options).elapsed)
    if reps is None and sum(elapsed) / len(elapsed) < settings.BENCH_FAST_THRESHOLD_S:
        while len(elapsed) < settings.BENCH_FAST_REPS:
            elapsed.append(thickness(curve, options).elapsed)
    return report, elapsed


def cmd_bench(args: argparse.Namespace) -> int:
    rows: List[BenchRow] = []
    crossover: Optional[int] = None
    for n in _bench_sizes(args):
        spec = _gen_spec(args.family, n, args.seed, 1.0, 1.0)
        curve = generate(spec)
        means = {}
        for variant, levels in (("default", args.levels), ("depth-1", 1)):
            with curve_context(spec.label, curve.edge_count):
                report, elapsed = timed_runs(curve, _options(args, levels), args.reps)
            row = BenchRow.from_report(spec.label, report, elapsed)
            rows.append(row)
            means[variant] = row.elapsed_seconds
            logger.debug(
                "bench.cell", n=curve.edge_count, variant=variant, reps=row.reps,
                mean=row.elapsed_seconds,
            )
        if crossover is None and means["default"] < means["depth-1"]:
            crossover = curve.edge_count
    sys.stdout.write(format_csv(rows))
    logger.info("bench.crossover", family=args.family, n=crossover)
    return 0


def cmd_tags(args: argparse.Namespace) -> int:
    _, curve = _load(args)
    sys.stdout.write(format_tag_table(curve, args.levels))
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    curve = generate(_gen_spec(args.family, args.n, args.seed, args.step, args.side))
    if args.output:
        write_curve(curve, args.output)
    else:
        sys.stdout.write(format_curve(curve))
    return 0


COMMANDS = {
    "compute": cmd_compute,
    "bench": cmd_bench,
    "tags": cmd_tags,
    "gen": cmd_gen,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except RopelengthError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.exit_code
    setup_logging(debug=args.debug or settings.DEBUG)
    try:
        return COMMANDS[args.command](args)
    except RopelengthError as exc:
        logger.debug("cli.failed", code=exc.code, details=exc.details)
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.exit_code
    finally:
        if args.metrics_file:
            metrics.write_metrics(args.metrics_file)
