"""Octree search for the shortest POCAs of a polygonal curve.

For every edge ``e_i`` the tree is descended from the root; a box is
entered only if it holds an edge that precedes ``e_i`` in ``by_oct``,
lies within the current cutoff of ``e_i`` and meets the ramp of
``e_i``.  Edges of the surviving leaves are classified against ``e_i``
in one vectorized batch.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ropelength.config import settings
from ropelength.core.exceptions import InvalidInputError
from ropelength.core.logging import get_logger
from ropelength.schemas.curve import EdgeTable, Poca, PolyCurve, Vec3
from ropelength.schemas.octree import Aabb, Octree, OctreeNode
from ropelength.schemas.search import (
    Algorithm,
    PocaSearchResult,
    Ramp,
    SearchCounters,
    SearchOptions,
)
from ropelength.services.geometry import (
    PairBatch,
    canonical_mask,
    classify_pairs,
    min_rad,
    position,
)
from ropelength.services.spatial_index import build

logger = get_logger(__name__)

# Relative slack of the box/ramp test over the classifier's tolerance.
_RAMP_SLACK = 1e-9
# Absolute rounding slack, relative to coordinate magnitude; covers the
# classifier's ``geometry.ROUND_SLACK`` term for any pair inside the box.
_ROUND_SLACK = 1e-11

_Entry = Tuple[float, int, float, int, float]
_Key = Tuple[int, float, int, float]


# ------------------------------------------------------------------
# Ramps
# ------------------------------------------------------------------


def ramp_for_edge(curve: PolyCurve, i: int) -> Ramp:
    """Ramp of global edge *i*.

    Raises:
        InvalidInputError: If *i* is not an edge id.
    """
    table = curve.table()
    if not 0 <= i < table.n:
        raise InvalidInputError(f"edge id {i} out of range", details={"edges": table.n})
    u = table.unit[i]
    prev = int(table.prev[i])
    nxt = int(table.next[i])
    return Ramp(
        u=Vec3(*u.tolist()),
        lo=float(table.start[i] @ u),
        hi=float(table.end[i] @ u),
        apex=Vec3(*table.start[i].tolist()),
        t_in=Vec3(*table.unit[prev].tolist()) if prev >= 0 else None,
        t_out=Vec3(*u.tolist()),
        end_cap=Vec3(*table.end[i].tolist()) if nxt < 0 else None,
    )


def ramp_contains(ramp: Ramp, w: Sequence[float], slack: float = 0.0) -> bool:
    """Exact membership of point *w* in *ramp* (grown by *slack*)."""
    proj = sum(a * b for a, b in zip(w, ramp.u))
    if ramp.lo - slack <= proj <= ramp.hi + slack:
        return True
    rel = [a - b for a, b in zip(w, ramp.apex)]
    inside_in = ramp.t_in is None or sum(a * b for a, b in zip(rel, ramp.t_in)) >= -slack
    inside_out = sum(a * b for a, b in zip(rel, ramp.t_out)) <= slack
    if inside_in and inside_out:
        return True
    if ramp.end_cap is not None:
        beyond = sum((a - b) * c for a, b, c in zip(w, ramp.end_cap, ramp.u))
        return beyond >= -slack
    return False


def _box_range(box: Aabb, n: Sequence[float]) -> Tuple[float, float]:
    """Minimum and maximum of ``p·n`` over the corners of *box*."""
    low = high = 0.0
    for lo, hi, c in zip(box.lo, box.hi, n):
        a = lo * c
        b = hi * c
        if a <= b:
            low += a
            high += b
        else:
            low += b
            high += a
    return low, high


def aabb_intersects_ramp(box: Aabb, ramp: Ramp, slack: float = 0.0) -> bool:
    """Conservative box/ramp test: never false when the box meets the ramp.

    The box is rejected only if it misses the slab, every corner fails one
    wedge inequality strictly, and it lies wholly before the end cap.
    """
    low, high = _box_range(box, ramp.u)
    if high >= ramp.lo - slack and low <= ramp.hi + slack:
        return True
    low_out, _ = _box_range(box, ramp.t_out)
    apex_out = sum(a * b for a, b in zip(ramp.apex, ramp.t_out))
    wedge = low_out - apex_out <= slack
    if wedge and ramp.t_in is not None:
        _, high_in = _box_range(box, ramp.t_in)
        apex_in = sum(a * b for a, b in zip(ramp.apex, ramp.t_in))
        wedge = high_in - apex_in >= -slack
    if wedge:
        return True
    if ramp.end_cap is not None:
        cap = sum(a * b for a, b in zip(ramp.end_cap, ramp.u))
        return high - cap >= -slack
    return False


# ------------------------------------------------------------------
# Box–segment distance
# ------------------------------------------------------------------


def _point_box_sq(p: Sequence[float], box: Aabb) -> float:
    total = 0.0
    for c, lo, hi in zip(p, box.lo, box.hi):
        if c < lo:
            total += (lo - c) ** 2
        elif c > hi:
            total += (c - hi) ** 2
    return total


def aabb_segment_distance(
    box: Aabb, p0: Sequence[float], p1: Sequence[float]
) -> float:
    """Exact distance between *box* and the segment ``p0p1``.

    The squared point-to-box distance along the segment is a convex
    piecewise quadratic in the segment parameter; it is minimized
    exactly on each piece between the axis-plane crossings.

    Raises:
        InvalidInputError: If the segment has zero length.
    """
    p0 = [float(c) for c in p0]
    d = [float(b) - a for a, b in zip(p0, p1)]
    if not any(d):
        raise InvalidInputError("segment has zero length")
    breaks = {0.0, 1.0}
    for c, dc, lo, hi in zip(p0, d, box.lo, box.hi):
        if dc != 0.0:
            for bound in (lo, hi):
                t = (bound - c) / dc
                if 0.0 < t < 1.0:
                    breaks.add(t)
    params = sorted(breaks)
    best = math.inf
    for a, b in zip(params, params[1:]):
        mid = 0.5 * (a + b)
        cross = 0.0
        slope = 0.0
        for c, dc, lo, hi in zip(p0, d, box.lo, box.hi):
            here = c + mid * dc
            if here < lo:
                cross += (lo - c) * -dc
                slope += dc * dc
            elif here > hi:
                cross += (c - hi) * dc
                slope += dc * dc
        t = a if slope == 0.0 else min(b, max(a, -cross / slope))
        best = min(best, _point_box_sq([c + t * dc for c, dc in zip(p0, d)], box))
        if best == 0.0:
            break
    return math.sqrt(best)


def _gap(box: Aabb, seg_lo: Sequence[float], seg_hi: Sequence[float]) -> float:
    """Distance between *box* and the segment's bounding box."""
    total = 0.0
    for blo, bhi, slo, shi in zip(box.lo, box.hi, seg_lo, seg_hi):
        if shi < blo:
            total += (blo - shi) ** 2
        elif slo > bhi:
            total += (slo - bhi) ** 2
    return math.sqrt(total)


# ------------------------------------------------------------------
# Search state
# ------------------------------------------------------------------


class SearchState:
    """Cutoff, shortest-POCA set and counters of a search.

    A chord of length ``L`` is kept while ``L <= limit·(1 + tol)``, where
    ``limit`` is the smaller of the seeded cutoff and the shortest length
    seen so far; keeping the tolerance band retains all tied minima.
    """

    def __init__(
        self,
        table: EdgeTable,
        tol: float,
        seed: float = math.inf,
        collect_all: bool = False,
    ) -> None:
        self.table = table
        self.tol = tol
        self.seed = seed
        self.best = math.inf
        self.prune_by_distance = not collect_all
        self.found: Dict[_Key, _Entry] = {}
        self.everything: Optional[Dict[_Key, _Entry]] = {} if collect_all else None
        self.edge_edge_checks = 0
        self.box_ramp_checks = 0
        self.box_distance_checks = 0

    @property
    def limit(self) -> float:
        return min(self.seed, self.best)

    @property
    def counters(self) -> SearchCounters:
        return SearchCounters(
            edge_edge_checks=self.edge_edge_checks,
            box_ramp_checks=self.box_ramp_checks,
            box_distance_checks=self.box_distance_checks,
        )

    @staticmethod
    def _entry(batch: PairBatch, k: int) -> Tuple[_Key, _Entry]:
        i, s = int(batch.i[k]), float(batch.s[k])
        j, t = int(batch.j[k]), float(batch.t[k])
        if i > j:
            i, s, j, t = j, t, i, s
        return (i, s, j, t), (float(batch.length[k]), i, s, j, t)

    def offer(self, batch: PairBatch) -> None:
        """Record the local-minimum chords of a classified batch."""
        self.edge_edge_checks += int(batch.i.size)
        hits = np.nonzero(batch.valid & canonical_mask(self.table, batch))[0]
        if hits.size == 0:
            return
        if self.everything is not None:
            for k in hits.tolist():
                key, entry = self._entry(batch, k)
                self.everything[key] = entry
        lengths = batch.length[hits]
        keep = hits[lengths <= self.limit * (1.0 + self.tol)]
        if keep.size == 0:
            return
        shortest = float(batch.length[keep].min())
        if shortest < self.best:
            self.best = shortest
            self._trim()
        bound = self.best * (1.0 + self.tol)
        for k in keep.tolist():
            if batch.length[k] <= bound:
                key, entry = self._entry(batch, k)
                self.found[key] = entry

    def _trim(self) -> None:
        bound = self.best * (1.0 + self.tol)
        self.found = {k: e for k, e in self.found.items() if e[0] <= bound}

    def merge(self, other: SearchState) -> None:
        """Fold another state's results and counters into this one."""
        self.edge_edge_checks += other.edge_edge_checks
        self.box_ramp_checks += other.box_ramp_checks
        self.box_distance_checks += other.box_distance_checks
        if self.everything is not None and other.everything is not None:
            self.everything.update(other.everything)
        self.found.update(other.found)
        self.best = min(self.best, other.best)
        self._trim()

    def result(
        self,
        curve: PolyCurve,
        algorithm: Algorithm,
        levels: int,
        capacity: int,
    ) -> PocaSearchResult:
        """Shortest POCAs sorted by endpoint, with the counters."""
        all_pocas = None
        if self.everything is not None:
            all_pocas = _to_pocas(curve, self.everything)
        return PocaSearchResult(
            min_length=self.best,
            pocas=_to_pocas(curve, self.found),
            counters=self.counters,
            all_pocas=all_pocas,
            levels=levels,
            capacity=capacity,
            algorithm=algorithm,
        )


def _to_pocas(curve: PolyCurve, entries: Dict[_Key, _Entry]) -> List[Poca]:
    pocas = []
    for key in sorted(entries):
        length, i, s, j, t = entries[key]
        pocas.append(
            Poca(a=position(curve, i, s), b=position(curve, j, t), length=length)
        )
    return pocas


# ------------------------------------------------------------------
# Search
# ------------------------------------------------------------------


def _check_leaf(
    state: SearchState, tree: Octree, leaf: OctreeNode, i: int, rank_i: int
) -> None:
    stop = min(leaf.stop, rank_i)
    if stop <= leaf.first:
        return
    edges = tree.order[leaf.first:stop]
    table = state.table
    edges = edges[~table.adjacent(np.full(edges.size, i), edges)]
    if edges.size == 0:
        return
    state.offer(classify_pairs(table, np.full(edges.size, i), edges, state.tol))


def search_edge(
    tree: Octree,
    curve: PolyCurve,
    i: int,
    state: SearchState,
    ramp: Optional[Ramp] = None,
) -> None:
    """Check edge *i* against every earlier ``by_oct`` edge that can matter.

    Children are skipped when their lowest rank is not below ``e_i``'s,
    when they lie farther than the cutoff from ``e_i`` (one distance
    check) or when they miss the ramp (one ramp check).  The root is
    entered unconditionally.
    """
    table = state.table
    rank_i = int(tree.rank_of[i])
    if rank_i == 0:
        return
    ramp = ramp or ramp_for_edge(curve, i)
    p0 = table.start[i].tolist()
    p1 = table.end[i].tolist()
    seg_lo = [min(a, b) for a, b in zip(p0, p1)]
    seg_hi = [max(a, b) for a, b in zip(p0, p1)]
    seg_len = float(table.length[i])
    scale = max(abs(c) for c in p0 + p1)
    spread = max(state.tol, _RAMP_SLACK)

    stack = [tree.root]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            _check_leaf(state, tree, node, i, rank_i)
            continue
        for child in reversed(node.children):
            if child.first >= rank_i:
                continue
            limit = state.limit
            if state.prune_by_distance and limit < math.inf:
                state.box_distance_checks += 1
                reach = limit * (1.0 + state.tol)
                if _gap(child.bounds, seg_lo, seg_hi) > reach:
                    continue
                if aabb_segment_distance(child.bounds, p0, p1) > reach:
                    continue
            box = child.bounds
            half = 0.5 * math.dist(box.lo, box.hi)
            center = [0.5 * (a + b) for a, b in zip(box.lo, box.hi)]
            longest = math.dist(center, p0) + half + seg_len
            if state.prune_by_distance:
                longest = min(longest, state.limit * (1.0 + state.tol))
            slack = spread * longest + _ROUND_SLACK * max(
                scale, *(abs(c) for c in box.lo + box.hi)
            )
            state.box_ramp_checks += 1
            if not aabb_intersects_ramp(box, ramp, slack):
                continue
            stack.append(child)


def _seed(curve: PolyCurve, options: SearchOptions) -> float:
    if options.seed_cutoff and not options.report_all_minima:
        return 2.0 * min_rad(curve)
    return math.inf


def _search_ranks(
    tree: Octree, curve: PolyCurve, ranks: Sequence[int], options: SearchOptions
) -> SearchState:
    state = SearchState(
        curve.table(),
        options.tol,
        seed=_seed(curve, options),
        collect_all=options.report_all_minima,
    )
    for rank in ranks:
        search_edge(tree, curve, int(tree.order[rank]), state)
    return state


def find_pocas(
    curve: PolyCurve,
    options: Optional[SearchOptions] = None,
    tree: Optional[Octree] = None,
) -> PocaSearchResult:
    """Shortest POCAs of *curve* via the octree search.

    Args:
        curve: The curve to search.
        options: Search options; defaults apply when omitted.
        tree: A prebuilt octree over *curve*; built on demand otherwise.

    Returns:
        ``min_length`` (``inf`` when no POCA exists below the cutoff), the
        shortest POCAs within ``tol`` of it, and the counters.
    """
    options = options or SearchOptions()
    tree = tree or build(curve, options.levels)
    n = tree.n
    if options.parallel and n > 1:
        workers = options.workers or settings.PARALLEL_WORKERS
        chunks = [range(start, n, workers) for start in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            states = list(
                pool.map(lambda ranks: _search_ranks(tree, curve, ranks, options), chunks)
            )
        state = states[0]
        for other in states[1:]:
            state.merge(other)
    else:
        state = _search_ranks(tree, curve, range(n), options)
    result = state.result(curve, Algorithm.OCTREE, tree.levels, tree.capacity)
    logger.debug(
        "poca.search_complete",
        n=n,
        levels=tree.levels,
        capacity=tree.capacity,
        min_length=result.min_length,
        pocas=len(result.pocas),
        parallel=options.parallel,
        **result.counters.model_dump(),
    )
    return result
