"""Toolkit configuration using Pydantic Settings.

Every setting has a default; environment variables prefixed with
``ROPELENGTH_`` (or a local ``.env`` file) override them.
"""
from __future__ import annotations

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# 3·(ℓ−1) tag bits must fit a 64-bit unsigned integer.
TAG_LEVEL_LIMIT = 22


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables."""

    # Logging
    DEBUG: bool = False

    # Geometry
    TOLERANCE: float = Field(1e-10, gt=0.0)
    MAX_LEVELS: int = Field(TAG_LEVEL_LIMIT, ge=1, le=TAG_LEVEL_LIMIT)

    # Search
    NAIVE_CHUNK_PAIRS: int = Field(262_144, ge=1)
    PARALLEL_WORKERS: int = Field(4, ge=1)

    # Benchmarking
    BENCH_MIN_REPS: int = Field(10, ge=1)
    BENCH_FAST_REPS: int = Field(100, ge=1)
    BENCH_FAST_THRESHOLD_S: float = Field(1.0, gt=0.0)

    model_config = SettingsConfigDict(
        env_prefix="ROPELENGTH_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator("BENCH_FAST_REPS")
    @classmethod
    def _fast_reps_not_below_minimum(cls, value: int, info) -> int:
        minimum = info.data.get("BENCH_MIN_REPS", 1)
        if value < minimum:
            raise ValueError(
                "BENCH_FAST_REPS must be at least BENCH_MIN_REPS "
                f"({value} < {minimum})"
            )
        return value


# Module-level singleton; import ``settings`` for direct access.
settings = Settings()
