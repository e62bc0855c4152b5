"""Vector and segment primitives, minRad and local-minimum chord tests.

Pair classification is vectorized over batches of edge pairs; the
single-pair operations (``segment_closest``, ``edge_pair_pocas``) are
views of the batched code so that every caller computes bit-identical
values for the same pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ropelength.config import settings
from ropelength.core.exceptions import (
    InvalidInputError,
    InvalidPositionError,
    NoTurningAngleError,
    PreconditionError,
)
from ropelength.schemas.curve import (
    CurvePos,
    EdgeTable,
    Poca,
    PolyCurve,
    TangentPair,
    Vec3,
)

# sin² of the angle below which two segments are treated as parallel.
PARALLEL_EPS = 1e-14

# Rounding slack of the cone tests per unit of ``|q0 − p0| + |d1| + |d2|``.
# Must stay below the ramp test's coordinate slack in ``poca``.
ROUND_SLACK = 1e-13


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Fixed summation order keeps results independent of batch shape.
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def _vec(a: np.ndarray) -> Vec3:
    return Vec3(float(a[0]), float(a[1]), float(a[2]))


# ------------------------------------------------------------------
# Positions and tangents
# ------------------------------------------------------------------


def edge_of(curve: PolyCurve, p: CurvePos) -> int:
    """Global edge id of a curve position.

    Raises:
        InvalidPositionError: If the component or edge does not exist.
    """
    if p.component >= len(curve.components):
        raise InvalidPositionError(
            f"component {p.component} out of range",
            details={"components": len(curve.components)},
        )
    count = curve.components[p.component].edge_count
    if p.edge >= count:
        raise InvalidPositionError(
            f"edge {p.edge} out of range for component {p.component}",
            details={"edges": count},
        )
    return curve.table().offsets[p.component] + p.edge


def position(curve: PolyCurve, edge: int, t: float) -> CurvePos:
    """Curve position at parameter *t* on global edge *edge*."""
    ref = curve.edge_ref(edge)
    return CurvePos(component=ref.component, edge=ref.index, t=float(t))


def point_at(curve: PolyCurve, p: CurvePos) -> Vec3:
    """Point ``(1−t)·v_i + t·v_{i+1}`` on the curve."""
    table = curve.table()
    edge = edge_of(curve, p)
    if p.t == 0.0:
        return _vec(table.start[edge])
    if p.t == 1.0:
        return _vec(table.end[edge])
    return _vec((1.0 - p.t) * table.start[edge] + p.t * table.end[edge])


def tangents_at(curve: PolyCurve, p: CurvePos) -> TangentPair:
    """Inward and outward unit tangents at a curve position.

    At an interior point both equal the edge direction.  At a vertex the
    inward tangent is the incoming edge's direction and the outward one
    the outgoing edge's; a side is ``None`` at an open endpoint.
    """
    table = curve.table()
    edge = edge_of(curve, p)
    u = _vec(table.unit[edge])
    t_in: Optional[Vec3] = u
    t_out: Optional[Vec3] = u
    if p.t == 0.0:
        prev = int(table.prev[edge])
        t_in = _vec(table.unit[prev]) if prev >= 0 else None
    elif p.t == 1.0:
        nxt = int(table.next[edge])
        t_out = _vec(table.unit[nxt]) if nxt >= 0 else None
    return TangentPair(t_in=t_in, t_out=t_out)


# ------------------------------------------------------------------
# Curvature and length
# ------------------------------------------------------------------


def turning_angle(curve: PolyCurve, vertex: CurvePos) -> float:
    """Exterior angle in ``[0, π]`` at vertex ``v_i`` (``t = 0`` on ``e_i``).

    The final vertex of an open component may also be addressed as
    ``t = 0`` on the edge past the last one, or ``t = 1`` on the last edge.

    Raises:
        InvalidPositionError: If *vertex* is not a vertex position.
        NoTurningAngleError: At either endpoint of an open component.
    """
    if vertex.component < len(curve.components):
        component = curve.components[vertex.component]
        last = component.edge_count
        at_end = (vertex.edge == last and vertex.t == 0.0) or (
            vertex.edge == last - 1 and vertex.t == 1.0
        )
        if at_end and not component.closed:
            raise NoTurningAngleError(
                details={"component": vertex.component, "edge": vertex.edge}
            )
    if vertex.t != 0.0:
        raise InvalidPositionError(
            "turning angle needs a vertex position (t = 0)",
            details={"t": vertex.t},
        )
    table = curve.table()
    edge = edge_of(curve, vertex)
    prev = int(table.prev[edge])
    if prev < 0:
        raise NoTurningAngleError(
            details={"component": vertex.component, "edge": vertex.edge}
        )
    u_in = table.unit[prev]
    u_out = table.unit[edge]
    return float(
        math.atan2(np.linalg.norm(np.cross(u_in, u_out)), float(u_in @ u_out))
    )


def vertex_radii(table: EdgeTable) -> np.ndarray:
    """Per-vertex terms ``min(|e_in|, |e_out|) / (2 tan(α/2))``.

    Only vertices with both incident edges contribute.  ``tan(α/2)`` is
    evaluated as ``sin α / (1 + cos α)`` so that straight vertices give
    ``inf`` and reversing vertices give ``0``.
    """
    has_in = table.prev >= 0
    edges = np.nonzero(has_in)[0]
    prev = table.prev[edges]
    u_in = table.unit[prev]
    u_out = table.unit[edges]
    cos = _dot(u_in, u_out)
    sin = np.linalg.norm(np.cross(u_in, u_out), axis=1)
    shorter = np.minimum(table.length[prev], table.length[edges])
    with np.errstate(divide="ignore", invalid="ignore"):
        radii = shorter * (1.0 + cos) / (2.0 * sin)
    straight = sin == 0.0
    radii[straight] = np.where(cos[straight] > 0.0, np.inf, 0.0)
    return np.maximum(radii, 0.0)


def min_rad(curve: PolyCurve) -> float:
    """Polygonal minimum radius of curvature; ``inf`` with no turning vertex."""
    radii = vertex_radii(curve.table())
    if radii.size == 0:
        return math.inf
    return float(radii.min())


def curve_length(curve: PolyCurve) -> float:
    """Sum of all edge lengths over all components."""
    return math.fsum(curve.table().length.tolist())


# ------------------------------------------------------------------
# Segment–segment closest points
# ------------------------------------------------------------------


def closest_params(
    p0: np.ndarray, d1: np.ndarray, q0: np.ndarray, d2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Parameters ``(s, t)`` minimizing ``|p0 + s·d1 − q0 − t·d2|``.

    Inputs are ``(k, 3)`` arrays of segment starts and direction
    vectors.  Parallel segments with overlapping projections return the
    center of the overlap (one witness of the minimizing continuum).
    """
    a = _dot(d1, d1)
    e = _dot(d2, d2)
    b = _dot(d1, d2)
    r = p0 - q0
    c = _dot(d1, r)
    f = _dot(d2, r)
    denom = a * e - b * b
    parallel = denom <= PARALLEL_EPS * a * e

    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.clip((b * f - c * e) / denom, 0.0, 1.0)
    s = np.where(parallel, 0.0, s)
    t = (b * s + f) / e
    s = np.where(
        t < 0.0,
        np.clip(-c / a, 0.0, 1.0),
        np.where(t > 1.0, np.clip((b - c) / a, 0.0, 1.0), s),
    )
    t = np.clip(t, 0.0, 1.0)

    if parallel.any():
        s_q0 = -c / a
        s_q1 = (b - c) / a
        lo = np.minimum(s_q0, s_q1)
        hi = np.maximum(s_q0, s_q1)
        inner_lo = np.maximum(lo, 0.0)
        inner_hi = np.minimum(hi, 1.0)
        s_par = np.where(
            inner_lo <= inner_hi,
            0.5 * (inner_lo + inner_hi),
            np.where(hi < 0.0, 0.0, 1.0),
        )
        t_par = np.clip((b * s_par + f) / e, 0.0, 1.0)
        s = np.where(parallel, s_par, s)
        t = np.where(parallel, t_par, t)
    return s, t


def _chord(
    offset: np.ndarray, d1: np.ndarray, d2: np.ndarray, s: np.ndarray, t: np.ndarray
) -> np.ndarray:
    """Chord ``q(t) − p(s)`` from the start offset ``q0 − p0``.

    Absolute points are never formed, so the error stays relative to the
    pair's own extent rather than to the coordinate magnitude.
    """
    return (offset + t[:, None] * d2) - s[:, None] * d1


def segment_closest(
    p0: Sequence[float],
    p1: Sequence[float],
    q0: Sequence[float],
    q1: Sequence[float],
) -> tuple[float, float, float]:
    """Closest points between segments ``p0p1`` and ``q0q1``.

    Returns:
        ``(s, t, dist)`` with ``s, t`` in ``[0, 1]``.

    Raises:
        InvalidInputError: If either segment has zero length.
    """
    p0a, p1a, q0a, q1a = (np.asarray(v, dtype=float).reshape(1, 3) for v in (p0, p1, q0, q1))
    d1 = p1a - p0a
    d2 = q1a - q0a
    if not d1.any() or not d2.any():
        raise InvalidInputError("segment has zero length")
    s, t = closest_params(p0a, d1, q0a, d2)
    w = _chord(q0a - p0a, d1, d2, s, t)
    return float(s[0]), float(t[0]), float(np.sqrt(_dot(w, w))[0])


# ------------------------------------------------------------------
# Local-minimum classification
# ------------------------------------------------------------------


@dataclass(frozen=True)
class PairBatch:
    """Classification of a batch of edge pairs ``(i[k], j[k])``.

    ``s`` is the parameter on ``e_i``, ``t`` on ``e_j``; ``valid`` marks
    pairs whose closest chord satisfies the tangent-cone conditions.
    """

    i: np.ndarray
    j: np.ndarray
    s: np.ndarray
    t: np.ndarray
    length: np.ndarray
    valid: np.ndarray


def _cone_ok(
    table: EdgeTable, edges: np.ndarray, param: np.ndarray, w: np.ndarray, slack: np.ndarray
) -> np.ndarray:
    """``T⁻·w >= 0`` and ``T⁺·w <= 0`` at the chord end on *edges*."""
    u = table.unit[edges]
    at_start = param == 0.0
    at_end = param == 1.0
    t_in = np.where(at_start[:, None], table.prev_unit[edges], u)
    t_out = np.where(at_end[:, None], table.next_unit[edges], u)
    has_in = ~at_start | (table.prev[edges] >= 0)
    has_out = ~at_end | (table.next[edges] >= 0)
    return (~has_in | (_dot(t_in, w) >= -slack)) & (
        ~has_out | (_dot(t_out, w) <= slack)
    )


def classify_pairs(
    table: EdgeTable, i: np.ndarray, j: np.ndarray, tol: float
) -> PairBatch:
    """Closest chords of edge pairs and whether they are local minima.

    Each pair is evaluated with the lower edge id first and mapped back,
    so ``(i, j)`` and ``(j, i)`` yield mirrored, bit-identical results.
    Callers are responsible for excluding equal or adjacent edges.
    """
    i = np.asarray(i, dtype=np.intp)
    j = np.asarray(j, dtype=np.intp)
    swap = i > j
    first = np.where(swap, j, i)
    second = np.where(swap, i, j)

    p0 = table.start[first]
    d1 = table.vec[first]
    q0 = table.start[second]
    d2 = table.vec[second]
    s, t = closest_params(p0, d1, q0, d2)
    offset = q0 - p0
    w = _chord(offset, d1, d2, s, t)
    length = np.sqrt(_dot(w, w))
    spread = np.sqrt(_dot(offset, offset)) + table.length[first] + table.length[second]
    slack = tol * length + ROUND_SLACK * spread
    valid = _cone_ok(table, first, s, w, slack) & _cone_ok(
        table, second, t, -w, slack
    )
    return PairBatch(
        i=i,
        j=j,
        s=np.where(swap, t, s),
        t=np.where(swap, s, t),
        length=length,
        valid=valid,
    )


def canonical_mask(table: EdgeTable, batch: PairBatch) -> np.ndarray:
    """False where a chord ends at ``t = 1`` of an edge with a successor.

    Such an endpoint is the successor's ``t = 0`` point, and the chord is
    also found through the successor's pair; counting it once per pair
    would report it twice.
    """
    return ~((batch.s == 1.0) & (table.next[batch.i] >= 0)) & ~(
        (batch.t == 1.0) & (table.next[batch.j] >= 0)
    )


def edge_pair_pocas(
    curve: PolyCurve, i: int, j: int, tol: Optional[float] = None
) -> List[Poca]:
    """Local-minimum chords between global edges *i* and *j*.

    At most one chord is returned: the squared distance is convex on
    ``e_i × e_j``, so its minimum is the only candidate, and it is kept
    when the tangent-cone conditions of the whole curve hold with slack
    ``tol·length`` plus a rounding term proportional to the pair's extent.

    Raises:
        InvalidInputError: If an edge id is out of range.
        PreconditionError: If the edges are equal or share a vertex.
    """
    table = curve.table()
    tol = settings.TOLERANCE if tol is None else tol
    for edge in (i, j):
        if not 0 <= edge < table.n:
            raise InvalidInputError(
                f"edge id {edge} out of range", details={"edges": table.n}
            )
    if table.adjacent(i, j):
        raise PreconditionError(
            "edge pair is equal or shares a vertex", details={"i": i, "j": j}
        )
    batch = classify_pairs(table, np.array([i]), np.array([j]), tol)
    if not batch.valid[0]:
        return []
    return [
        Poca(
            a=position(curve, i, batch.s[0]),
            b=position(curve, j, batch.t[0]),
            length=float(batch.length[0]),
        )
    ]
