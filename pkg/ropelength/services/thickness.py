"""Thickness and ropelength of polygonal curves.

Thickness is ``min(2·minRad, POCA)``; ropelength is length over
thickness.  ``poca_naive`` checks every nonadjacent edge pair and is the
reference the octree search is tested against.
"""
from __future__ import annotations

import math
import time
from typing import Iterator, Optional, Tuple

import numpy as np

from ropelength.config import settings
from ropelength.core import metrics
from ropelength.core.exceptions import DegenerateCurveError
from ropelength.core.logging import get_logger
from ropelength.schemas.curve import EdgeTable, PolyCurve
from ropelength.schemas.search import (
    Algorithm,
    PocaSearchResult,
    ReportStatus,
    SearchOptions,
    SearchReport,
)
from ropelength.services.geometry import classify_pairs, curve_length, min_rad
from ropelength.services.poca import SearchState, find_pocas
from ropelength.services.spatial_index import build, resolve_levels

logger = get_logger(__name__)


def _pair_blocks(table: EdgeTable, chunk: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Nonadjacent pairs ``i < j`` in row blocks of about *chunk* pairs."""
    n = table.n
    row = 0
    while row < n - 1:
        stop = row
        total = 0
        while stop < n - 1 and (total == 0 or total + (n - 1 - stop) <= chunk):
            total += n - 1 - stop
            stop += 1
        rows = np.arange(row, stop)
        counts = n - 1 - rows
        i = np.repeat(rows, counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        j = i + 1 + (np.arange(total) - starts)
        keep = ~table.adjacent(i, j)
        yield i[keep], j[keep]
        row = stop


def poca_naive(
    curve: PolyCurve,
    tol: Optional[float] = None,
    seed_cutoff: float = math.inf,
    report_all_minima: bool = False,
) -> PocaSearchResult:
    """Shortest POCAs by checking every nonadjacent unordered edge pair.

    Args:
        curve: The curve to search.
        tol: Relative tolerance; ``settings.TOLERANCE`` when omitted.
        seed_cutoff: Discard chords longer than this.
        report_all_minima: Also return every POCA found.

    Returns:
        A search result whose ``edge_edge_checks`` equals the number of
        nonadjacent pairs.
    """
    table = curve.table()
    tol = settings.TOLERANCE if tol is None else tol
    state = SearchState(table, tol, seed=seed_cutoff, collect_all=report_all_minima)
    for i, j in _pair_blocks(table, settings.NAIVE_CHUNK_PAIRS):
        if i.size:
            state.offer(classify_pairs(table, i, j, tol))
    return state.result(curve, Algorithm.NAIVE, levels=1, capacity=table.n)


def thickness(curve: PolyCurve, options: Optional[SearchOptions] = None) -> SearchReport:
    """Thickness report of *curve*.

    Uses the octree search, or the naive oracle when the depth resolves
    to 1.  A zero-thickness curve yields a report with status
    ``degenerate`` and infinite ropelength rather than an error.
    """
    options = options or SearchOptions()
    started = time.perf_counter()
    n = curve.edge_count
    levels = resolve_levels(n, options.levels)
    radius = min_rad(curve)

    if levels == 1:
        seed = 2.0 * radius if options.seed_cutoff and not options.report_all_minima else math.inf
        result = poca_naive(
            curve,
            options.tol,
            seed_cutoff=seed,
            report_all_minima=options.report_all_minima,
        )
    else:
        tree = build(curve, levels)
        result = find_pocas(curve, options, tree=tree)

    thick = min(2.0 * radius, result.min_length)
    length = curve_length(curve)
    status = ReportStatus.OK if thick > 0.0 else ReportStatus.DEGENERATE
    report = SearchReport(
        n=n,
        min_rad=radius,
        poca_length=result.min_length,
        thickness=thick,
        length=length,
        ropelength=length / thick if thick > 0.0 else math.inf,
        pocas=result.pocas,
        counters=result.counters,
        elapsed=time.perf_counter() - started,
        levels=result.levels,
        capacity=result.capacity,
        algorithm=result.algorithm,
        status=status,
        all_pocas=result.all_pocas,
    )
    metrics.record_report(report)
    if status is ReportStatus.DEGENERATE:
        logger.warning(
            "thickness.degenerate",
            n=n,
            min_rad=radius,
            poca_length=result.min_length,
        )
    logger.info(
        "thickness.complete",
        n=n,
        algorithm=report.algorithm.value,
        levels=report.levels,
        thickness=thick,
        elapsed=report.elapsed,
        **report.counters.model_dump(),
    )
    return report


def ropelength(curve: PolyCurve, options: Optional[SearchOptions] = None) -> float:
    """Length of *curve* divided by its thickness.

    Raises:
        DegenerateCurveError: If the thickness is zero.
    """
    report = thickness(curve, options)
    if report.degenerate:
        raise DegenerateCurveError(
            details={"min_rad": report.min_rad, "poca_length": report.poca_length}
        )
    return report.ropelength
