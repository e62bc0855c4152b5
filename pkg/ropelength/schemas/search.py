"""Schemas for POCA searches, thickness reports and benchmark rows."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from ropelength.config import settings
from ropelength.schemas.curve import Poca, Vec3


class Algorithm(str, Enum):
    """Which POCA search produced a result."""

    OCTREE = "octree"
    NAIVE = "naive"


class ReportStatus(str, Enum):
    """Whether the curve has positive thickness."""

    OK = "ok"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Ramp:
    """Region that can hold the far end of a POCA starting on an edge.

    The ramp is the slab ``lo <= w·u <= hi`` together with the wedge at
    ``apex`` bounded by ``(w − apex)·t_in >= 0`` and
    ``(w − apex)·t_out <= 0``.  ``t_in`` is ``None`` at the start of an
    open component, where the wedge is the single half-space of
    ``t_out``.  ``end_cap`` is set on the last edge of an open component
    and adds the half-space ``(w − end_cap)·u >= 0``.
    """

    u: Vec3
    lo: float
    hi: float
    apex: Vec3
    t_in: Optional[Vec3]
    t_out: Vec3
    end_cap: Optional[Vec3] = None


class SearchCounters(BaseModel):
    """Instrumentation counters of one search."""

    edge_edge_checks: int = Field(0, ge=0)
    box_ramp_checks: int = Field(0, ge=0)
    box_distance_checks: int = Field(0, ge=0)


class SearchOptions(BaseModel):
    """Knobs of a POCA search."""

    levels: Optional[int] = Field(
        None, ge=1, description="Octree levels ℓ; None selects ⌈¾ log₂ n⌉"
    )
    tol: float = Field(
        default_factory=lambda: settings.TOLERANCE,
        gt=0.0,
        description="Relative tolerance for cone tests and length ties",
    )
    seed_cutoff: bool = Field(
        False, description="Start the cutoff at 2·minRad instead of +∞"
    )
    report_all_minima: bool = Field(
        False, description="Disable distance pruning and return every POCA"
    )
    parallel: bool = Field(False, description="Search edges on a thread pool")
    workers: Optional[int] = Field(None, ge=1)


@dataclass
class PocaSearchResult:
    """Outcome of a POCA search.

    ``min_length`` is ``inf`` when no POCA was found below the cutoff.
    ``all_pocas`` is filled only when every local minimum was requested.
    """

    min_length: float
    pocas: List[Poca]
    counters: SearchCounters
    all_pocas: Optional[List[Poca]] = None
    levels: int = 1
    capacity: int = 1
    algorithm: Algorithm = Algorithm.OCTREE


class SearchReport(BaseModel):
    """Thickness and ropelength of a curve with supporting data.

    ``thickness == min(2·min_rad, poca_length)``; ``ropelength`` is
    ``length / thickness`` and ``inf`` when thickness is zero.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    n: int = Field(..., ge=1, description="Edge count")
    min_rad: float
    poca_length: float
    thickness: float
    length: float
    ropelength: float
    pocas: List[Poca]
    counters: SearchCounters
    elapsed: float = Field(..., ge=0.0, description="Seconds")
    levels: int
    capacity: int
    algorithm: Algorithm
    status: ReportStatus = ReportStatus.OK
    all_pocas: Optional[List[Poca]] = None

    @property
    def degenerate(self) -> bool:
        return self.status is ReportStatus.DEGENERATE


class BenchRow(BaseModel):
    """One CSV row of instrumentation output."""

    COLUMNS: ClassVar[tuple[str, ...]] = (
        "family",
        "n",
        "levels",
        "capacity",
        "edge_edge_checks",
        "box_ramp_checks",
        "box_distance_checks",
        "min_rad",
        "poca",
        "thickness",
        "ropelength",
        "elapsed_seconds",
        "elapsed_min_seconds",
        "reps",
    )

    family: str
    n: int
    levels: int
    capacity: int
    edge_edge_checks: int
    box_ramp_checks: int
    box_distance_checks: int
    min_rad: float
    poca: float
    thickness: float
    ropelength: float
    elapsed_seconds: float
    elapsed_min_seconds: float
    reps: int = 1

    @classmethod
    def from_report(
        cls,
        family: str,
        report: SearchReport,
        elapsed: List[float],
    ) -> BenchRow:
        """Build a row from a report and the timings of its repetitions."""
        return cls(
            family=family,
            n=report.n,
            levels=report.levels,
            capacity=report.capacity,
            edge_edge_checks=report.counters.edge_edge_checks,
            box_ramp_checks=report.counters.box_ramp_checks,
            box_distance_checks=report.counters.box_distance_checks,
            min_rad=report.min_rad,
            poca=report.poca_length,
            thickness=report.thickness,
            ropelength=report.ropelength,
            elapsed_seconds=sum(elapsed) / len(elapsed),
            elapsed_min_seconds=min(elapsed),
            reps=len(elapsed),
        )

    def as_csv_fields(self) -> List[str]:
        """Field values in column order, floats in shortest round-trip form."""
        values = self.model_dump()
        return [
            repr(values[c]) if isinstance(values[c], float) else str(values[c])
            for c in self.COLUMNS
        ]
