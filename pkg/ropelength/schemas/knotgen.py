"""Pydantic schemas for test-curve generators."""
from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator


class CurveFamily(str, Enum):
    """Available generator families."""

    TREFOIL = "trefoil"
    HOPF_PENTAGONS = "hopf-pentagons"
    HOPF_PENTAGONS_EXACT = "hopf-pentagons-exact"
    RANDOM_WALK = "random-walk"
    RANDOM_IN_BOX = "random-in-box"
    REGULAR_POLYGON = "regular-polygon"


# Families with a fixed vertex set ignore ``n``.
FIXED_FAMILIES = frozenset(
    {CurveFamily.HOPF_PENTAGONS, CurveFamily.HOPF_PENTAGONS_EXACT}
)
CLOSED_FAMILIES = frozenset(
    {
        CurveFamily.TREFOIL,
        CurveFamily.RANDOM_IN_BOX,
        CurveFamily.REGULAR_POLYGON,
    }
)


class GenSpec(BaseModel):
    """Parameters that fully determine a generated curve."""

    family: CurveFamily
    n: Optional[int] = Field(None, ge=1, description="Edge count")
    seed: int = Field(0, ge=0, description="Seed for random families")
    step: float = Field(1.0, gt=0.0, description="Random-walk step length")
    side: float = Field(1.0, gt=0.0, description="Regular-polygon side length")

    @model_validator(mode="after")
    def _check_edge_count(self) -> GenSpec:
        if self.family in FIXED_FAMILIES:
            return self
        if self.n is None:
            raise ValueError(f"family {self.family.value} requires an edge count")
        if self.family in CLOSED_FAMILIES and self.n < 3:
            raise ValueError(
                f"closed family {self.family.value} needs n >= 3, got {self.n}"
            )
        return self

    @property
    def label(self) -> str:
        """Short name used in CSV output."""
        return self.family.value
