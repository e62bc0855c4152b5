"""Data types for the traversal-ordered edge octree.

These are plain frozen dataclasses rather than pydantic models: the
search touches them millions of times and never serializes them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ropelength.schemas.curve import EdgeRef, Vec3


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box; ``lo <= hi`` componentwise."""

    lo: Vec3
    hi: Vec3

    def __post_init__(self) -> None:
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"inverted box {self.lo} > {self.hi}")

    def contains(self, p: Vec3 | Tuple[float, float, float], slack: float = 0.0) -> bool:
        """True when *p* lies in the box (grown by *slack*)."""
        return all(
            lo - slack <= c <= hi + slack for c, lo, hi in zip(p, self.lo, self.hi)
        )

    def union(self, other: Aabb) -> Aabb:
        """Smallest box enclosing both boxes."""
        return Aabb(
            Vec3(*(min(a, b) for a, b in zip(self.lo, other.lo))),
            Vec3(*(max(a, b) for a, b in zip(self.hi, other.hi))),
        )

    @classmethod
    def enclosing(cls, points: np.ndarray) -> Aabb:
        """Bounding box of an ``(k, 3)`` point array."""
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        return cls(Vec3(*lo.tolist()), Vec3(*hi.tolist()))


@dataclass(frozen=True)
class EdgeRecord:
    """An edge as stored in ``by_oct``: midpoint, length and start vertex."""

    midpoint: Vec3
    length: float
    start: Vec3
    edge: EdgeRef
    edge_id: int
    rank: int
    tag: int


@dataclass(frozen=True)
class OctreeNode:
    """A box of the octree.

    A leaf owns the ``count`` consecutive ``by_oct`` entries starting at
    ``first``; an internal node owns the union of its children's ranges,
    which are contiguous and in traversal order.  ``first`` is also the
    lowest ``by_oct`` rank in the subtree.
    """

    bounds: Aabb
    first: int
    count: int
    depth: int
    label: str
    children: Tuple[OctreeNode, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def stop(self) -> int:
        """One past the last ``by_oct`` rank in the subtree."""
        return self.first + self.count

    def iter_nodes(self) -> Iterator[OctreeNode]:
        """Pre-order traversal of the subtree."""
        yield self
        for child in self.children:
            yield from child.iter_nodes()

    def iter_leaves(self) -> Iterator[OctreeNode]:
        """Leaves of the subtree in traversal order."""
        for node in self.iter_nodes():
            if node.is_leaf:
                yield node

    def height(self) -> int:
        """Number of levels in the subtree (a leaf has height 1)."""
        if self.is_leaf:
            return 1
        return 1 + max(child.height() for child in self.children)


@dataclass(frozen=True, eq=False)
class Octree:
    """Traversal-ordered edges plus the box hierarchy over them."""

    root: OctreeNode
    by_oct: Tuple[EdgeRecord, ...]
    levels: int
    capacity: int
    order: np.ndarray = field(repr=False)
    rank_of: np.ndarray = field(repr=False)
    pruned: bool = True
    # Tag changes met by the limb-by-limb pass; 0 for other builders.
    transitions: int = 0

    @property
    def n(self) -> int:
        return len(self.by_oct)

    def leaves(self) -> List[OctreeNode]:
        """Leaves in traversal order."""
        return list(self.root.iter_leaves())

    def leaf_groups(self) -> List[List[EdgeRef]]:
        """Edge references held by each leaf, in traversal order."""
        return [
            [self.by_oct[k].edge for k in range(leaf.first, leaf.stop)]
            for leaf in self.leaves()
        ]

    def node_count(self) -> int:
        return sum(1 for _ in self.root.iter_nodes())

    def find(self, label: str) -> Optional[OctreeNode]:
        """Return the node with the given box label, if present."""
        for node in self.root.iter_nodes():
            if node.label == label:
                return node
        return None
