"""Pydantic schemas for polygonal space curves and chords on them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr, field_validator, model_validator


class Vec3(NamedTuple):
    """A point or vector in 3-space."""

    x: float
    y: float
    z: float


class EdgeRef(NamedTuple):
    """An edge named by its component and its index within the component."""

    component: int
    index: int


class Component(BaseModel):
    """One polygonal component: an ordered vertex list, open or closed."""

    vertices: List[Vec3]
    closed: bool = True

    @field_validator("vertices")
    @classmethod
    def _finite_coordinates(cls, vertices: List[Vec3]) -> List[Vec3]:
        for k, v in enumerate(vertices):
            if not all(math.isfinite(c) for c in v):
                raise ValueError(f"vertex {k} has a non-finite coordinate")
        return vertices

    @model_validator(mode="after")
    def _check_edges(self) -> Component:
        count = len(self.vertices)
        minimum = 3 if self.closed else 2
        if count < minimum:
            kind = "closed" if self.closed else "open"
            raise ValueError(
                f"{kind} components need at least {minimum} vertices, got {count}"
            )
        pairs = zip(self.vertices, self.vertices[1:])
        for k, (a, b) in enumerate(pairs):
            if a == b:
                raise ValueError(f"edge {k} has zero length")
        if self.closed and self.vertices[-1] == self.vertices[0]:
            raise ValueError(f"edge {count - 1} has zero length")
        return self

    @property
    def edge_count(self) -> int:
        """Number of edges (vertices for closed, vertices − 1 for open)."""
        return len(self.vertices) if self.closed else len(self.vertices) - 1


@dataclass(frozen=True, eq=False)
class EdgeTable:
    """Array view of a curve's edges in global edge-id order.

    Global ids run through the components in order.  ``prev``/``next``
    hold the global id of the neighbouring edge across the shared vertex
    or -1 at an open endpoint; ``prev_unit``/``next_unit`` hold that
    neighbour's direction (zeros when absent).
    """

    start: np.ndarray
    end: np.ndarray
    vec: np.ndarray
    length: np.ndarray
    unit: np.ndarray
    midpoint: np.ndarray
    component: np.ndarray
    local: np.ndarray
    prev: np.ndarray
    next: np.ndarray
    prev_unit: np.ndarray
    next_unit: np.ndarray
    offsets: tuple[int, ...]

    @property
    def n(self) -> int:
        return int(self.start.shape[0])

    def adjacent(self, i: np.ndarray | int, j: np.ndarray | int) -> np.ndarray | bool:
        """True where edges *i* and *j* are equal or share a vertex."""
        i = np.asarray(i)
        j = np.asarray(j)
        return (i == j) | (self.prev[i] == j) | (self.next[i] == j)


class PolyCurve(BaseModel):
    """One or more polygonal components."""

    components: List[Component] = Field(..., min_length=1)

    _table: Optional[EdgeTable] = PrivateAttr(default=None)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyCurve):
            return NotImplemented
        return self.components == other.components

    __hash__ = None  # type: ignore[assignment]

    @property
    def edge_count(self) -> int:
        """Total number of edges over all components."""
        return sum(c.edge_count for c in self.components)

    def edge_id(self, ref: EdgeRef | tuple[int, int]) -> int:
        """Convert ``(component, index)`` to a global edge id."""
        component, index = ref
        return self.table().offsets[component] + index

    def edge_ref(self, edge: int) -> EdgeRef:
        """Convert a global edge id to ``(component, index)``."""
        table = self.table()
        return EdgeRef(int(table.component[edge]), int(table.local[edge]))

    def table(self) -> EdgeTable:
        """Return the cached array view of the curve's edges."""
        if self._table is None:
            self._table = _build_table(self.components)
        return self._table


def _build_table(components: List[Component]) -> EdgeTable:
    starts, ends, comp_ids, locals_, prevs, nexts = [], [], [], [], [], []
    offsets: list[int] = []
    offset = 0
    for c, component in enumerate(components):
        verts = np.asarray(component.vertices, dtype=float)
        count = component.edge_count
        offsets.append(offset)
        local = np.arange(count)
        starts.append(verts[:count])
        ends.append(np.roll(verts, -1, axis=0)[:count] if component.closed else verts[1:])
        comp_ids.append(np.full(count, c))
        locals_.append(local)
        if component.closed:
            prevs.append(offset + (local - 1) % count)
            nexts.append(offset + (local + 1) % count)
        else:
            prev = offset + local - 1
            prev[0] = -1
            nxt = offset + local + 1
            nxt[-1] = -1
            prevs.append(prev)
            nexts.append(nxt)
        offset += count

    start = np.concatenate(starts)
    end = np.concatenate(ends)
    vec = end - start
    length = np.sqrt(vec[:, 0] ** 2 + vec[:, 1] ** 2 + vec[:, 2] ** 2)
    unit = vec / length[:, None]
    prev = np.concatenate(prevs)
    nxt = np.concatenate(nexts)
    prev_unit = np.where((prev >= 0)[:, None], unit[prev], 0.0)
    next_unit = np.where((nxt >= 0)[:, None], unit[nxt], 0.0)
    for arr in (start, end, vec, length, unit, prev_unit, next_unit):
        arr.setflags(write=False)
    return EdgeTable(
        start=start,
        end=end,
        vec=vec,
        length=length,
        unit=unit,
        midpoint=(start + end) / 2.0,
        component=np.concatenate(comp_ids),
        local=np.concatenate(locals_),
        prev=prev,
        next=nxt,
        prev_unit=prev_unit,
        next_unit=next_unit,
        offsets=tuple(offsets),
    )


class CurvePos(BaseModel):
    """A point on a curve: parameter ``t`` along one edge."""

    component: int = Field(..., ge=0)
    edge: int = Field(..., ge=0)
    t: float = Field(..., ge=0.0, le=1.0)


class TangentPair(BaseModel):
    """Inward and outward unit tangents at a curve position.

    A side is ``None`` at the endpoint of an open component, where the
    curve does not continue.
    """

    t_in: Optional[Vec3] = None
    t_out: Optional[Vec3] = None


class Poca(BaseModel):
    """A chord realizing a nontrivial local minimum of self-distance."""

    a: CurvePos
    b: CurvePos
    length: float = Field(..., ge=0.0)

    def swapped(self) -> Poca:
        """The same chord with its endpoints exchanged."""
        return Poca(a=self.b, b=self.a, length=self.length)
