"""Pydantic schemas and data types for curves, octrees and searches."""
from __future__ import annotations

from ropelength.schemas.curve import (
    Component,
    CurvePos,
    EdgeRef,
    EdgeTable,
    Poca,
    PolyCurve,
    TangentPair,
    Vec3,
)
from ropelength.schemas.knotgen import CurveFamily, GenSpec
from ropelength.schemas.octree import Aabb, EdgeRecord, Octree, OctreeNode
from ropelength.schemas.search import (
    Algorithm,
    BenchRow,
    PocaSearchResult,
    Ramp,
    ReportStatus,
    SearchCounters,
    SearchOptions,
    SearchReport,
)

__all__ = [
    "Aabb",
    "Algorithm",
    "BenchRow",
    "Component",
    "CurveFamily",
    "CurvePos",
    "EdgeRecord",
    "EdgeRef",
    "EdgeTable",
    "GenSpec",
    "Octree",
    "OctreeNode",
    "Poca",
    "PocaSearchResult",
    "PolyCurve",
    "Ramp",
    "ReportStatus",
    "SearchCounters",
    "SearchOptions",
    "SearchReport",
    "TangentPair",
    "Vec3",
]
