"""Traversal-ordered octree over edge midpoints.

The tree is built by sorting: midpoints are ranked along each axis,
each rank is cut into boxes of ``m`` edges, the three box numbers are
bit-interleaved into an octal tag, and sorting by tag yields the edges
in the order of a traversal of the full octree.  One pass over that
order then builds the tree limb by limb.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ropelength.config import settings
from ropelength.core.exceptions import InvalidInputError
from ropelength.core.logging import get_logger
from ropelength.schemas.curve import EdgeTable, PolyCurve, Vec3
from ropelength.schemas.octree import Aabb, EdgeRecord, Octree, OctreeNode

logger = get_logger(__name__)

# Largest box number whose spread bits fit the 64-bit tag.
_BOX_BITS = 21

_SPREAD_STEPS = (
    (32, 0x1F00000000FFFF),
    (16, 0x1F0000FF0000FF),
    (8, 0x100F00F00F00F00F),
    (4, 0x10C30C30C30C30C3),
    (2, 0x1249249249249249),
)


# ------------------------------------------------------------------
# Level policy
# ------------------------------------------------------------------


def default_levels(n: int) -> int:
    """Default octree depth ``⌈¾ log₂ n⌉``, at least 1."""
    if n < 1:
        raise InvalidInputError("edge count must be positive", details={"n": n})
    if n == 1:
        return 1
    return max(1, min(settings.MAX_LEVELS, math.ceil(0.75 * math.log2(n))))


def leaf_capacity(n: int, levels: int) -> int:
    """Leaf capacity ``m = ⌈n / 2^(ℓ−1)⌉``."""
    if n < 1 or levels < 1:
        raise InvalidInputError(
            "edge count and levels must be positive",
            details={"n": n, "levels": levels},
        )
    return -(-n // (1 << (levels - 1)))


def resolve_levels(n: int, levels: Optional[int]) -> int:
    """Apply the default and the tag-width clamp to a requested depth."""
    if levels is None:
        return default_levels(n)
    if levels < 1:
        raise InvalidInputError("levels must be at least 1", details={"levels": levels})
    if levels > settings.MAX_LEVELS:
        logger.warning(
            "octree.levels_clamped", requested=levels, levels=settings.MAX_LEVELS
        )
        return settings.MAX_LEVELS
    return levels


# ------------------------------------------------------------------
# Octal tags
# ------------------------------------------------------------------


def spread_bits(k: int | np.ndarray, levels: Optional[int] = None) -> int | np.ndarray:
    """Insert two zero bits between consecutive bits of *k*.

    Works on Python ints and on integer arrays (returned as ``uint64``).
    With *levels* given, *k* must be a valid box number ``< 2^(ℓ−1)``.

    Raises:
        InvalidInputError: If *k* is negative or too large.
    """
    scalar = not isinstance(k, np.ndarray)
    arr = np.asarray(k, dtype=np.int64)
    limit = 1 << (_BOX_BITS if levels is None else min(_BOX_BITS, levels - 1))
    if arr.size and (arr.min() < 0 or arr.max() >= limit):
        raise InvalidInputError(
            "box number out of range", details={"limit": limit, "levels": levels}
        )
    x = arr.astype(np.uint64)
    for shift, mask in _SPREAD_STEPS:
        x = (x | (x << np.uint64(shift))) & np.uint64(mask)
    return int(x) if scalar else x


def stable_order(keys: np.ndarray) -> np.ndarray:
    """Indices sorting *keys* ascending; equal keys keep index order."""
    return np.argsort(keys, kind="stable")


@dataclass(frozen=True)
class TagTable:
    """Per-edge box numbers and octal tags, indexed by global edge id."""

    levels: int
    capacity: int
    boxes: np.ndarray = field(repr=False)
    tags: np.ndarray = field(repr=False)


def axis_boxes(midpoints: np.ndarray, capacity: int) -> np.ndarray:
    """``(n, 3)`` box numbers: stable per-axis midpoint rank ``// capacity``."""
    n = int(midpoints.shape[0])
    boxes = np.empty((n, 3), dtype=np.int64)
    ranks = np.arange(n)
    for axis in range(3):
        by_axis = stable_order(midpoints[:, axis])
        rank = np.empty(n, dtype=np.int64)
        rank[by_axis] = ranks
        boxes[:, axis] = rank // capacity
    return boxes


def octal_tags(midpoints: np.ndarray, levels: int, capacity: Optional[int] = None) -> TagTable:
    """Octal tag of every edge from its midpoint ranks.

    Midpoints are stably sorted along x, y and z (ties keep edge-id
    order); an edge's box number on an axis is ``rank // m``.
    """
    n = int(midpoints.shape[0])
    if n == 0:
        raise InvalidInputError("no edges to tag")
    m = capacity if capacity is not None else leaf_capacity(n, levels)
    boxes = axis_boxes(midpoints, m)
    tags = (
        (spread_bits(boxes[:, 2], levels) << np.uint64(2))
        | (spread_bits(boxes[:, 1], levels) << np.uint64(1))
        | spread_bits(boxes[:, 0], levels)
    )
    return TagTable(levels=levels, capacity=m, boxes=boxes, tags=tags)


def tag_digits(tag: int, levels: int) -> str:
    """Octal digits of a tag, zero-padded to ``ℓ−1`` digits (``"0"`` at ℓ=1)."""
    if levels == 1:
        return "0"
    return format(tag, "o").zfill(levels - 1)


# ------------------------------------------------------------------
# Tree construction
# ------------------------------------------------------------------


def _edge_bounds(table: EdgeTable, edges: np.ndarray) -> Aabb:
    points = np.concatenate((table.start[edges], table.end[edges]))
    return Aabb.enclosing(points)


def _union(children: Sequence[OctreeNode]) -> Aabb:
    bounds = children[0].bounds
    for child in children[1:]:
        bounds = bounds.union(child.bounds)
    return bounds


def _prune_node(node: OctreeNode, capacity: int) -> OctreeNode:
    """Prune one node whose children are already pruned."""
    if node.is_leaf:
        return node
    if node.count <= capacity:
        return OctreeNode(
            bounds=node.bounds,
            first=node.first,
            count=node.count,
            depth=node.depth,
            label=node.label,
        )
    if len(node.children) == 1:
        only = node.children[0]
        return OctreeNode(
            bounds=node.bounds,
            first=node.first,
            count=node.count,
            depth=node.depth,
            label=node.label,
            children=only.children,
        )
    return node


@dataclass
class _LimbBox:
    first: int
    depth: int
    label: str
    children: List[OctreeNode] = field(default_factory=list)


def _make_records(
    curve: PolyCurve, order: np.ndarray, tags: np.ndarray
) -> tuple[EdgeRecord, ...]:
    table = curve.table()
    records = []
    for rank, edge in enumerate(order.tolist()):
        records.append(
            EdgeRecord(
                midpoint=Vec3(*table.midpoint[edge].tolist()),
                length=float(table.length[edge]),
                start=Vec3(*table.start[edge].tolist()),
                edge=curve.edge_ref(edge),
                edge_id=edge,
                rank=rank,
                tag=int(tags[edge]),
            )
        )
    return tuple(records)


def build(curve: PolyCurve, levels: Optional[int] = None, prune: bool = True) -> Octree:
    """Build the traversal-ordered octree of *curve*'s edges.

    Args:
        curve: The curve whose edges are indexed.
        levels: Octree depth ℓ; ``None`` selects ``default_levels(n)``.
        prune: Collapse small subtrees as each limb box closes.

    Returns:
        The octree with ``by_oct`` sorted by tag (ties by edge id).
    """
    table = curve.table()
    n = table.n
    levels = resolve_levels(n, levels)
    tagged = octal_tags(table.midpoint, levels)
    m = tagged.capacity
    tags = tagged.tags
    order = stable_order(tags)
    rank_of = np.empty(n, dtype=np.int64)
    rank_of[order] = np.arange(n)
    sorted_tags = tags[order].tolist()

    leaf_depth = levels - 1
    digits = tag_digits(sorted_tags[0], levels)
    limb = [
        _LimbBox(first=0, depth=d, label="B" + digits[:d]) for d in range(levels)
    ]
    root: Optional[OctreeNode] = None

    def close(depth: int, stop: int) -> None:
        nonlocal root
        box = limb[depth]
        if depth == leaf_depth:
            node = OctreeNode(
                bounds=_edge_bounds(table, order[box.first:stop]),
                first=box.first,
                count=stop - box.first,
                depth=depth,
                label=box.label,
            )
        else:
            node = OctreeNode(
                bounds=_union(box.children),
                first=box.first,
                count=stop - box.first,
                depth=depth,
                label=box.label,
                children=tuple(box.children),
            )
        if prune:
            node = _prune_node(node, m)
        if depth == 0:
            root = node
        else:
            limb[depth - 1].children.append(node)

    transitions = 0
    for rank in range(1, n):
        changed = sorted_tags[rank] ^ sorted_tags[rank - 1]
        if not changed:
            continue
        transitions += 1
        # Highest changed octal digit p closes every box from depth ℓ−1−p down.
        top = leaf_depth - (changed.bit_length() - 1) // 3
        for depth in range(leaf_depth, top - 1, -1):
            close(depth, rank)
        digits = tag_digits(sorted_tags[rank], levels)
        for depth in range(top, levels):
            limb[depth] = _LimbBox(first=rank, depth=depth, label="B" + digits[:depth])
    for depth in range(leaf_depth, -1, -1):
        close(depth, n)

    assert root is not None
    tree = Octree(
        root=root,
        by_oct=_make_records(curve, order, tags),
        levels=levels,
        capacity=m,
        order=order,
        rank_of=rank_of,
        pruned=prune,
        transitions=transitions,
    )
    logger.debug(
        "octree.built",
        n=n,
        levels=levels,
        capacity=m,
        nodes=tree.node_count(),
        leaves=len(tree.leaves()),
        transitions=transitions,
        pruned=prune,
    )
    return tree


def _prune_tree(node: OctreeNode, capacity: int) -> OctreeNode:
    if node.is_leaf:
        return node
    children = tuple(_prune_tree(child, capacity) for child in node.children)
    rebuilt = OctreeNode(
        bounds=node.bounds,
        first=node.first,
        count=node.count,
        depth=node.depth,
        label=node.label,
        children=children,
    )
    return _prune_node(rebuilt, capacity)


def prune(tree: Octree) -> Octree:
    """Return *tree* with every subtree of at most ``m`` edges collapsed.

    Internal nodes left with a single child adopt that child's children.
    Pruning an already pruned tree returns an equal tree.
    """
    return Octree(
        root=_prune_tree(tree.root, tree.capacity),
        by_oct=tree.by_oct,
        levels=tree.levels,
        capacity=tree.capacity,
        order=tree.order,
        rank_of=tree.rank_of,
        pruned=True,
        transitions=tree.transitions,
    )


def build_recursive_reference(
    curve: PolyCurve, m: Optional[int] = None, levels: Optional[int] = None
) -> Octree:
    """Top-down reference builder used to cross-check :func:`build`.

    Each box covers a range of per-axis rank sections and is split at the
    middle section of every axis into up to eight children; recursion
    stops at ``m`` or fewer edges or at depth ``ℓ−1``.  Edges inside a
    leaf are listed by edge id.
    """
    table = curve.table()
    n = table.n
    if levels is None:
        if m is None:
            levels = default_levels(n)
        else:
            levels = 1 + math.ceil(math.log2(-(-n // m))) if n > m else 1
    levels = resolve_levels(n, levels)
    if m is None:
        m = leaf_capacity(n, levels)
    boxes = axis_boxes(table.midpoint, m)
    sections = 1 << (levels - 1)
    while boxes.max(initial=0) >= sections:
        # A capacity smaller than the derived one needs more sections.
        levels += 1
        sections <<= 1
    tags = octal_tags(table.midpoint, levels, capacity=m).tags

    order: List[int] = []

    def split(edges: np.ndarray, lo: np.ndarray, size: int, depth: int, label: str) -> OctreeNode:
        first = len(order)
        if len(edges) <= m or depth == levels - 1:
            order.extend(sorted(edges.tolist()))
            return OctreeNode(
                bounds=_edge_bounds(table, edges),
                first=first,
                count=len(edges),
                depth=depth,
                label=label,
            )
        half = size // 2
        upper = boxes[edges] >= lo + half
        child_index = (
            (upper[:, 2].astype(int) << 2)
            | (upper[:, 1].astype(int) << 1)
            | upper[:, 0].astype(int)
        )
        children = []
        for index in range(8):
            members = edges[child_index == index]
            if members.size == 0:
                continue
            offset = np.array([(index >> axis) & 1 for axis in range(3)]) * half
            children.append(split(members, lo + offset, half, depth + 1, label + str(index)))
        return OctreeNode(
            bounds=_union(children),
            first=first,
            count=len(edges),
            depth=depth,
            label=label,
            children=tuple(children),
        )

    root = split(np.arange(n), np.zeros(3, dtype=np.int64), sections, 0, "B")
    order_arr = np.asarray(order, dtype=np.int64)
    rank_of = np.empty(n, dtype=np.int64)
    rank_of[order_arr] = np.arange(n)
    return Octree(
        root=root,
        by_oct=_make_records(curve, order_arr, tags),
        levels=levels,
        capacity=m,
        order=order_arr,
        rank_of=rank_of,
        pruned=True,
    )


# ------------------------------------------------------------------
# Debug dump
# ------------------------------------------------------------------


def edge_label(curve: PolyCurve, edge: int) -> str:
    """``e<component><index>`` for small curves, ``e<component>.<index>`` otherwise."""
    ref = curve.edge_ref(edge)
    compact = len(curve.components) < 10 and all(
        c.edge_count < 10 for c in curve.components
    )
    if compact:
        return f"e{ref.component}{ref.index}"
    return f"e{ref.component}.{ref.index}"


def format_tag_table(curve: PolyCurve, levels: Optional[int] = None) -> str:
    """Per-edge tag table, one line per edge in ``by_oct`` order.

    Columns: edge, x-box, y-box, z-box, bits, octal, decimal.
    """
    table = curve.table()
    levels = resolve_levels(table.n, levels)
    tagged = octal_tags(table.midpoint, levels)
    order = stable_order(tagged.tags)
    width = 3 * (levels - 1)
    lines = ["# edge x-box y-box z-box bits octal decimal"]
    for edge in order.tolist():
        tag = int(tagged.tags[edge])
        x, y, z = tagged.boxes[edge].tolist()
        bits = format(tag, "b").zfill(width) if width else "0"
        lines.append(
            f"{edge_label(curve, edge)} {x} {y} {z} {bits} "
            f"{tag_digits(tag, levels)} {tag}"
        )
    return "\n".join(lines) + "\n"
