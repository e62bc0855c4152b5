"""Domain services: geometry, octree, POCA search, thickness, generators."""
from __future__ import annotations
