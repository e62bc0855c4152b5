"""Prometheus metrics for search instrumentation."""
from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

from prometheus_client import (
    CollectorRegistry,
    Counter,
    Histogram,
    generate_latest,
    write_to_textfile,
)

if TYPE_CHECKING:
    from ropelength.schemas.search import SearchReport

# ---------------------------------------------------------------------------
# Metric definitions
# ---------------------------------------------------------------------------

REGISTRY = CollectorRegistry(auto_describe=True)

EDGE_EDGE_CHECKS = Counter(
    "ropelength_edge_edge_checks",
    "Edge pairs classified for local-minimum chords",
    ["algorithm"],
    registry=REGISTRY,
)
BOX_RAMP_CHECKS = Counter(
    "ropelength_box_ramp_checks",
    "Octree boxes tested against an edge ramp",
    ["algorithm"],
    registry=REGISTRY,
)
BOX_DISTANCE_CHECKS = Counter(
    "ropelength_box_distance_checks",
    "Octree boxes tested against the current cutoff distance",
    ["algorithm"],
    registry=REGISTRY,
)
CURVES_EVALUATED = Counter(
    "ropelength_curves",
    "Curves whose thickness was computed",
    ["status"],
    registry=REGISTRY,
)
SEARCH_SECONDS = Histogram(
    "ropelength_search_seconds",
    "Wall-clock time of thickness computations",
    ["algorithm"],
    registry=REGISTRY,
    buckets=(0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 60.0),
)


def record_report(report: SearchReport) -> None:
    """Add one thickness report to the process-wide metrics.

    Args:
        report: A completed search report.
    """
    algorithm = report.algorithm.value
    counters = report.counters
    EDGE_EDGE_CHECKS.labels(algorithm=algorithm).inc(counters.edge_edge_checks)
    BOX_RAMP_CHECKS.labels(algorithm=algorithm).inc(counters.box_ramp_checks)
    BOX_DISTANCE_CHECKS.labels(algorithm=algorithm).inc(
        counters.box_distance_checks
    )
    CURVES_EVALUATED.labels(status=report.status.value).inc()
    SEARCH_SECONDS.labels(algorithm=algorithm).observe(report.elapsed)


def render_metrics() -> bytes:
    """Return the registry in Prometheus text exposition format."""
    return generate_latest(REGISTRY)


def write_metrics(path: str | Path) -> None:
    """Write the registry to *path* in Prometheus text format.

    Args:
        path: Destination file (written atomically by prometheus_client).
    """
    write_to_textfile(str(path), REGISTRY)
