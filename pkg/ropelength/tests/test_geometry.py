"""Tests for curve schemas and the geometry service."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from pydantic import ValidationError

from ropelength.core.exceptions import (
    InvalidInputError,
    InvalidPositionError,
    NoTurningAngleError,
    PreconditionError,
)
from ropelength.schemas.curve import Component, CurvePos, EdgeRef, PolyCurve
from ropelength.services.geometry import (
    classify_pairs,
    curve_length,
    edge_pair_pocas,
    min_rad,
    point_at,
    segment_closest,
    tangents_at,
    turning_angle,
)
from ropelength.services.knotgen import (
    gen_random_walk,
    gen_regular_polygon,
    gen_trefoil,
)
from ropelength.tests.conftest import polygon

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord, coord)


# ---------------------------------------------------------------------------
# schemas/curve.py
# ---------------------------------------------------------------------------


class TestComponentValidation:
    """Tests for curve invariants enforced by the schema."""

    def test_closed_needs_three_vertices(self) -> None:
        with pytest.raises(ValidationError):
            Component(vertices=[(0, 0, 0), (1, 0, 0)], closed=True)

    def test_open_needs_two_vertices(self) -> None:
        with pytest.raises(ValidationError):
            Component(vertices=[(0, 0, 0)], closed=False)

    def test_repeated_vertex_rejected(self) -> None:
        with pytest.raises(ValidationError):
            Component(vertices=[(0, 0, 0), (0, 0, 0), (1, 0, 0)], closed=False)

    def test_closing_edge_zero_length_rejected(self) -> None:
        with pytest.raises(ValidationError):
            Component(vertices=[(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 0, 0)])

    def test_non_finite_rejected(self) -> None:
        with pytest.raises(ValidationError):
            Component(vertices=[(0, 0, 0), (math.nan, 0, 0)], closed=False)

    def test_edge_count(self) -> None:
        assert Component(vertices=[(0, 0, 0), (1, 0, 0), (1, 1, 0)]).edge_count == 3
        assert (
            Component(vertices=[(0, 0, 0), (1, 0, 0), (1, 1, 0)], closed=False).edge_count
            == 2
        )

    def test_position_t_out_of_range(self) -> None:
        with pytest.raises(ValidationError):
            CurvePos(component=0, edge=0, t=1.5)


class TestEdgeTable:
    """Tests for global edge ids and neighbour links."""

    def test_global_ids_run_through_components(self, hopf) -> None:
        assert hopf.edge_count == 10
        assert hopf.edge_id(EdgeRef(1, 2)) == 7
        assert hopf.edge_ref(7) == EdgeRef(1, 2)

    def test_closed_neighbours_wrap(self, unit_square) -> None:
        table = unit_square.table()
        assert table.prev.tolist() == [3, 0, 1, 2]
        assert table.next.tolist() == [1, 2, 3, 0]

    def test_open_endpoints_have_no_neighbour(self, straight_line) -> None:
        table = straight_line.table()
        assert table.prev[0] == -1
        assert table.next[2] == -1

    def test_adjacency(self, unit_square) -> None:
        table = unit_square.table()
        assert table.adjacent(0, 1)
        assert table.adjacent(0, 3)
        assert table.adjacent(2, 2)
        assert not table.adjacent(0, 2)

    def test_equality_ignores_cached_table(self, unit_square) -> None:
        other = PolyCurve(components=unit_square.components)
        unit_square.table()
        assert other == unit_square


# ---------------------------------------------------------------------------
# point_at / tangents_at
# ---------------------------------------------------------------------------


class TestPointAt:
    """Tests for positions on the curve."""

    def test_interior_point(self, unit_square) -> None:
        assert point_at(unit_square, CurvePos(component=0, edge=0, t=0.5)) == (
            0.5,
            0.0,
            0.0,
        )

    def test_end_of_closing_edge_is_first_vertex(self, unit_square) -> None:
        assert point_at(unit_square, CurvePos(component=0, edge=3, t=1.0)) == (
            0.0,
            0.0,
            0.0,
        )

    def test_missing_component(self, unit_square) -> None:
        with pytest.raises(InvalidPositionError):
            point_at(unit_square, CurvePos(component=1, edge=0, t=0.0))

    def test_missing_edge(self, unit_square) -> None:
        with pytest.raises(InvalidPositionError):
            point_at(unit_square, CurvePos(component=0, edge=4, t=0.0))


class TestTangentsAt:
    """Tests for inward and outward tangents."""

    def test_interior_tangents_equal(self, unit_square) -> None:
        pair = tangents_at(unit_square, CurvePos(component=0, edge=1, t=0.25))
        assert pair.t_in == pair.t_out == (0.0, 1.0, 0.0)

    def test_vertex_tangents(self, unit_square) -> None:
        pair = tangents_at(unit_square, CurvePos(component=0, edge=0, t=0.0))
        assert pair.t_in == (0.0, -1.0, 0.0)
        assert pair.t_out == (1.0, 0.0, 0.0)

    def test_open_endpoints(self, straight_line) -> None:
        start = tangents_at(straight_line, CurvePos(component=0, edge=0, t=0.0))
        end = tangents_at(straight_line, CurvePos(component=0, edge=2, t=1.0))
        assert start.t_in is None
        assert end.t_out is None


# ---------------------------------------------------------------------------
# turning_angle / min_rad / curve_length
# ---------------------------------------------------------------------------


class TestTurningAngle:
    """Tests for exterior angles at vertices."""

    def test_square_corner(self, unit_square) -> None:
        angle = turning_angle(unit_square, CurvePos(component=0, edge=2, t=0.0))
        assert angle == pytest.approx(math.pi / 2)

    def test_straight_vertex(self, straight_line) -> None:
        assert turning_angle(
            straight_line, CurvePos(component=0, edge=1, t=0.0)
        ) == pytest.approx(0.0)

    def test_open_start_has_no_angle(self, straight_line) -> None:
        with pytest.raises(NoTurningAngleError):
            turning_angle(straight_line, CurvePos(component=0, edge=0, t=0.0))

    @pytest.mark.parametrize(("edge", "t"), [(3, 0.0), (2, 1.0)])
    def test_open_end_has_no_angle(self, straight_line, edge: int, t: float) -> None:
        with pytest.raises(NoTurningAngleError):
            turning_angle(straight_line, CurvePos(component=0, edge=edge, t=t))

    def test_closed_last_edge_end_is_not_a_vertex(self, unit_square) -> None:
        with pytest.raises(InvalidPositionError):
            turning_angle(unit_square, CurvePos(component=0, edge=3, t=1.0))

    def test_requires_vertex(self, unit_square) -> None:
        with pytest.raises(InvalidPositionError):
            turning_angle(unit_square, CurvePos(component=0, edge=0, t=0.5))


class TestMinRad:
    """Tests for the polygonal minimum radius of curvature."""

    def test_unit_square(self, unit_square) -> None:
        assert min_rad(unit_square) == pytest.approx(0.5)

    def test_equilateral_triangle(self) -> None:
        triangle = polygon([(0, 0, 0), (1, 0, 0), (0.5, math.sqrt(3) / 2, 0)])
        assert min_rad(triangle) == pytest.approx(1 / (2 * math.sqrt(3)))

    @pytest.mark.parametrize("k", [3, 5, 8, 17, 100])
    def test_regular_polygon_closed_form(self, k: int) -> None:
        expected = 1.0 / (2.0 * math.tan(math.pi / k))
        assert min_rad(gen_regular_polygon(k)) == pytest.approx(expected, rel=1e-12)

    def test_straight_polyline_is_infinite(self, straight_line) -> None:
        assert min_rad(straight_line) == math.inf

    def test_reversal_is_zero(self) -> None:
        folded = polygon([(0, 0, 0), (1, 0, 0), (0.5, 0, 0)], closed=False)
        assert min_rad(folded) == 0.0

    def test_shorter_edge_wins(self, flat_rectangle) -> None:
        assert min_rad(flat_rectangle) == pytest.approx(0.05)

    def test_invariant_under_rotation(self) -> None:
        curve = gen_trefoil(40)
        c, s = math.cos(0.7), math.sin(0.7)
        rotated = polygon(
            [(c * x - s * y, s * x + c * y, z + 3.0) for x, y, z in curve.components[0].vertices]
        )
        assert min_rad(rotated) == pytest.approx(min_rad(curve), rel=1e-9)


class TestCurveLength:
    """Tests for total curve length."""

    def test_unit_square(self, unit_square) -> None:
        assert curve_length(unit_square) == 4.0

    def test_open_polyline(self, straight_line) -> None:
        assert curve_length(straight_line) == 3.0


# ---------------------------------------------------------------------------
# segment_closest
# ---------------------------------------------------------------------------


class TestSegmentClosest:
    """Tests for segment–segment closest points."""

    def test_skew_crossing(self) -> None:
        s, t, dist = segment_closest((0, 0, 0), (2, 0, 0), (1, -1, 1), (1, 1, 1))
        assert (s, t) == (0.5, 0.5)
        assert dist == pytest.approx(1.0)

    def test_parallel_overlap_returns_center(self) -> None:
        s, t, dist = segment_closest((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0))
        assert (s, t) == (0.5, 0.5)
        assert dist == pytest.approx(1.0)

    def test_collinear_disjoint(self) -> None:
        s, t, dist = segment_closest((0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0))
        assert (s, t) == (1.0, 0.0)
        assert dist == pytest.approx(1.0)

    def test_endpoint_clamp(self) -> None:
        s, t, dist = segment_closest((0, 0, 0), (1, 0, 0), (2, 1, 0), (2, 2, 0))
        assert (s, t) == (1.0, 0.0)
        assert dist == pytest.approx(math.sqrt(2.0))

    def test_zero_length_segment(self) -> None:
        with pytest.raises(InvalidInputError):
            segment_closest((0, 0, 0), (0, 0, 0), (1, 0, 0), (2, 0, 0))

    @given(point, point, point, point)
    def test_not_above_grid_minimum(self, p0, p1, q0, q1) -> None:
        assume(math.dist(p0, p1) > 1e-3 and math.dist(q0, q1) > 1e-3)
        s, t, dist = segment_closest(p0, p1, q0, q1)
        assert 0.0 <= s <= 1.0 and 0.0 <= t <= 1.0

        grid = np.linspace(0.0, 1.0, 51)
        a = np.asarray(p0) + grid[:, None] * (np.asarray(p1) - np.asarray(p0))
        b = np.asarray(q0) + grid[:, None] * (np.asarray(q1) - np.asarray(q0))
        sampled = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)).min()
        assert dist <= sampled + 1e-6

        x = np.asarray(p0) + s * (np.asarray(p1) - np.asarray(p0))
        y = np.asarray(q0) + t * (np.asarray(q1) - np.asarray(q0))
        assert float(np.linalg.norm(y - x)) == pytest.approx(dist, abs=1e-9)


# ---------------------------------------------------------------------------
# classify_pairs / edge_pair_pocas
# ---------------------------------------------------------------------------


class TestEdgePairPocas:
    """Tests for local-minimum chords between two edges."""

    def test_square_opposite_sides(self, unit_square) -> None:
        (poca,) = edge_pair_pocas(unit_square, 0, 2)
        assert poca.length == pytest.approx(1.0)
        assert (poca.a.edge, poca.a.t) == (0, 0.5)
        assert (poca.b.edge, poca.b.t) == (2, 0.5)

    def test_arguments_swapped_mirror_exactly(self, trefoil_64) -> None:
        forward = edge_pair_pocas(trefoil_64, 3, 40)
        backward = edge_pair_pocas(trefoil_64, 40, 3)
        assert [p.swapped() for p in backward] == forward

    def test_convex_polygon_skip_one_pair_has_none(self, pentagon) -> None:
        assert edge_pair_pocas(pentagon, 0, 2) == []

    def test_adjacent_edges_rejected(self, unit_square) -> None:
        with pytest.raises(PreconditionError):
            edge_pair_pocas(unit_square, 0, 1)

    def test_wraparound_adjacency_rejected(self, unit_square) -> None:
        with pytest.raises(PreconditionError):
            edge_pair_pocas(unit_square, 3, 0)

    def test_same_edge_rejected(self, unit_square) -> None:
        with pytest.raises(PreconditionError):
            edge_pair_pocas(unit_square, 2, 2)

    def test_edge_out_of_range(self, unit_square) -> None:
        with pytest.raises(InvalidInputError):
            edge_pair_pocas(unit_square, 0, 9)

    def test_crossing_edges_give_zero_chord(self, bowtie) -> None:
        (poca,) = edge_pair_pocas(bowtie, 0, 2)
        assert poca.length == 0.0

    @pytest.mark.parametrize("offset", [1e3, 1e4, 1e5])
    def test_interior_chord_survives_far_translation(self, offset: float) -> None:
        curve = gen_random_walk(500, seed=4)
        shift = offset * np.array([1.0, -1.0, 0.5])
        moved = PolyCurve(
            components=[
                Component(
                    vertices=(np.asarray(c.vertices) + shift).tolist(), closed=c.closed
                )
                for c in curve.components
            ]
        )
        (near,) = edge_pair_pocas(curve, 123, 126)
        (far,) = edge_pair_pocas(moved, 123, 126)
        assert 0.0 < near.a.t < 1.0 and 0.0 < near.b.t < 1.0
        rounding = 64 * float(np.spacing(offset))
        assert far.length == pytest.approx(near.length, abs=rounding)
        assert far.a.t == pytest.approx(near.a.t, abs=1e-6)


class TestClassifyPairs:
    """Tests for the batched classifier."""

    def test_orientation_independent(self, trefoil_64) -> None:
        table = trefoil_64.table()
        i = np.array([0, 5, 17, 30])
        j = np.array([20, 44, 2, 61])
        forward = classify_pairs(table, i, j, 1e-10)
        backward = classify_pairs(table, j, i, 1e-10)
        assert np.array_equal(forward.s, backward.t)
        assert np.array_equal(forward.t, backward.s)
        assert np.array_equal(forward.length, backward.length)
        assert np.array_equal(forward.valid, backward.valid)

    def test_batch_matches_single_pairs(self, trefoil_64) -> None:
        table = trefoil_64.table()
        i = np.array([0, 5, 17, 30])
        j = np.array([20, 44, 2, 61])
        batch = classify_pairs(table, i, j, 1e-10)
        for k in range(len(i)):
            single = classify_pairs(table, i[k : k + 1], j[k : k + 1], 1e-10)
            assert single.length[0] == batch.length[k]
            assert single.valid[0] == batch.valid[k]
