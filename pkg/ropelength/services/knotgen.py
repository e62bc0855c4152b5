"""Deterministic test-curve generators.

Random families draw from ``numpy``'s counter-based Philox bit
generator keyed by the seed, so a ``(family, n, seed)`` triple names the
same curve on every platform.  Unit directions use sphere point picking:
``z = 2u − 1`` and azimuth ``φ = 2πv`` from two uniforms ``u, v``.
"""
from __future__ import annotations

import math
from typing import List

import numpy as np

from ropelength.core.exceptions import InvalidInputError
from ropelength.core.logging import get_logger
from ropelength.schemas.curve import Component, PolyCurve, Vec3
from ropelength.schemas.knotgen import CurveFamily, GenSpec

logger = get_logger(__name__)

HOPF_RADIUS = 24.7

# Rounded pentagon vertices of the standard two-component test link.
HOPF_PENTAGON_VERTICES = (
    (
        (14.5, 20.0, 0.0),
        (23.5, -7.6, 0.0),
        (0.0, -24.7, 0.0),
        (-23.5, -7.6, 0.0),
        (-14.5, 20.0, 0.0),
    ),
    (
        (0.0, 0.0, 14.5),
        (0.0, 27.6, 23.5),
        (0.0, 44.7, 0.0),
        (0.0, 27.6, -23.5),
        (0.0, 0.0, -14.5),
    ),
)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _component(points: np.ndarray, closed: bool) -> Component:
    return Component(vertices=[Vec3(*p) for p in points.tolist()], closed=closed)


def _require(n: int, minimum: int, family: str) -> None:
    if n < minimum:
        raise InvalidInputError(
            f"{family} needs at least {minimum} edges, got {n}", details={"n": n}
        )


def gen_trefoil(n: int) -> PolyCurve:
    """Closed trefoil sampled at ``θ = 2πk/n``."""
    _require(n, 3, "trefoil")
    theta = 2.0 * math.pi * np.arange(n) / n
    radial = 1.0 + (2.0 / 3.0) * np.cos(3.0 * theta)
    points = np.column_stack(
        (
            radial * np.cos(2.0 * theta),
            radial * np.sin(2.0 * theta),
            (2.0 / 3.0) * np.sin(3.0 * theta),
        )
    )
    return PolyCurve(components=[_component(points, closed=True)])


def gen_hopf_pentagons(exact: bool = False) -> PolyCurve:
    """Two linked pentagons.

    The default returns the rounded vertices used for the tag and tree
    fixtures.  With ``exact=True`` the pentagons are regular with
    circumradius 24.7: the first centered at the origin in the ``z = 0``
    plane, the second in the ``x = 0`` plane centered at the midpoint of
    the first one's top edge.
    """
    if not exact:
        return PolyCurve(
            components=[
                Component(vertices=[Vec3(*v) for v in verts])
                for verts in HOPF_PENTAGON_VERTICES
            ]
        )
    r = HOPF_RADIUS
    apothem = r * math.cos(math.pi / 5)
    first: List[Vec3] = []
    second: List[Vec3] = []
    for k in range(5):
        angle = math.radians(54.0 - 72.0 * k)
        first.append(Vec3(r * math.cos(angle), r * math.sin(angle), 0.0))
        phi = math.radians(144.0 - 72.0 * k)
        second.append(Vec3(0.0, apothem + r * math.cos(phi), r * math.sin(phi)))
    return PolyCurve(
        components=[Component(vertices=first), Component(vertices=second)]
    )


def gen_random_walk(n: int, seed: int = 0, step: float = 1.0) -> PolyCurve:
    """Open walk of *n* steps of length *step* in uniform random directions."""
    _require(n, 1, "random-walk")
    if step <= 0.0:
        raise InvalidInputError("step must be positive", details={"step": step})
    u, v = _rng(seed).random((2, n))
    z = 2.0 * u - 1.0
    phi = 2.0 * math.pi * v
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    steps = step * np.column_stack((r * np.cos(phi), r * np.sin(phi), z))
    points = np.vstack((np.zeros((1, 3)), np.cumsum(steps, axis=0)))
    return PolyCurve(components=[_component(points, closed=False)])


def gen_random_in_box(n: int, seed: int = 0) -> PolyCurve:
    """Closed polygon on *n* vertices uniform in the unit cube.

    A vertex equal to its predecessor is redrawn from the same stream.
    """
    _require(n, 3, "random-in-box")
    rng = _rng(seed)
    points = rng.random((n, 3))
    for k in range(n):
        while np.array_equal(points[k], points[k - 1]):
            points[k] = rng.random(3)
    return PolyCurve(components=[_component(points, closed=True)])


def gen_regular_polygon(k: int, side: float = 1.0) -> PolyCurve:
    """Planar regular *k*-gon with the given side length."""
    _require(k, 3, "regular-polygon")
    if side <= 0.0:
        raise InvalidInputError("side must be positive", details={"side": side})
    radius = side / (2.0 * math.sin(math.pi / k))
    theta = 2.0 * math.pi * np.arange(k) / k
    points = np.column_stack(
        (radius * np.cos(theta), radius * np.sin(theta), np.zeros(k))
    )
    return PolyCurve(components=[_component(points, closed=True)])


def generate(spec: GenSpec) -> PolyCurve:
    """Build the curve described by *spec*."""
    family = spec.family
    logger.debug("knotgen.generate", family=family.value, n=spec.n, seed=spec.seed)
    if family is CurveFamily.TREFOIL:
        return gen_trefoil(spec.n)
    if family is CurveFamily.HOPF_PENTAGONS:
        return gen_hopf_pentagons()
    if family is CurveFamily.HOPF_PENTAGONS_EXACT:
        return gen_hopf_pentagons(exact=True)
    if family is CurveFamily.RANDOM_WALK:
        return gen_random_walk(spec.n, spec.seed, spec.step)
    if family is CurveFamily.RANDOM_IN_BOX:
        return gen_random_in_box(spec.n, spec.seed)
    return gen_regular_polygon(spec.n, spec.side)
