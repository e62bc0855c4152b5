"""Shared test fixtures for the ropelength test suite."""
from __future__ import annotations

import math

import pytest
from hypothesis import HealthCheck, settings as hyp_settings

from ropelength.core.logging import setup_logging
from ropelength.schemas.curve import Component, PolyCurve
from ropelength.services.knotgen import (
    gen_hopf_pentagons,
    gen_random_walk,
    gen_regular_polygon,
    gen_trefoil,
)

hyp_settings.register_profile(
    "ropelength",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
hyp_settings.load_profile("ropelength")

# Apothem of the regular pentagons in the exact Hopf link.
HOPF_APOTHEM = 24.7 * math.cos(math.pi / 5)

# Table of box numbers and tags of the rounded Hopf link at ℓ = 3,
# keyed by global edge id, in by_oct order.
HOPF_TAGS = {
    2: ((0, 0, 1), 4),
    3: ((0, 1, 1), 6),
    0: ((3, 1, 0), 11),
    1: ((2, 0, 1), 12),
    7: ((1, 3, 0), 19),
    8: ((2, 2, 0), 24),
    5: ((1, 1, 3), 39),
    9: ((2, 0, 2), 40),
    4: ((0, 2, 2), 48),
    6: ((1, 2, 2), 49),
}

HOPF_TAG_TABLE = """\
# edge x-box y-box z-box bits octal decimal
e02 0 0 1 000100 04 4
e03 0 1 1 000110 06 6
e00 3 1 0 001011 13 11
e01 2 0 1 001100 14 12
e12 1 3 0 010011 23 19
e13 2 2 0 011000 30 24
e10 1 1 3 100111 47 39
e14 2 0 2 101000 50 40
e04 0 2 2 110000 60 48
e11 1 2 2 110001 61 49
"""


@pytest.fixture(autouse=True)
def _stderr_logging() -> None:
    setup_logging()


def polygon(points, closed: bool = True) -> PolyCurve:
    """Single-component curve from a list of 3-tuples."""
    return PolyCurve(components=[Component(vertices=points, closed=closed)])


@pytest.fixture
def unit_square() -> PolyCurve:
    return polygon([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)])


@pytest.fixture
def flat_rectangle() -> PolyCurve:
    return polygon([(0, 0, 0), (10, 0, 0), (10, 0.1, 0), (0, 0.1, 0)])


@pytest.fixture
def bowtie() -> PolyCurve:
    """Planar quadrilateral whose diagonals-as-edges cross at (0.5, 0.5)."""
    return polygon([(0, 0, 0), (1, 1, 0), (1, 0, 0), (0, 1, 0)])


@pytest.fixture
def straight_line() -> PolyCurve:
    return polygon([(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)], closed=False)


@pytest.fixture
def pentagon() -> PolyCurve:
    return gen_regular_polygon(5)


@pytest.fixture
def hopf() -> PolyCurve:
    return gen_hopf_pentagons()


@pytest.fixture
def hopf_exact() -> PolyCurve:
    return gen_hopf_pentagons(exact=True)


@pytest.fixture
def trefoil_64() -> PolyCurve:
    return gen_trefoil(64)


@pytest.fixture
def walk_100() -> PolyCurve:
    return gen_random_walk(100, seed=3)
