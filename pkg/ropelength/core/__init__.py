"""Core module: shared infrastructure for the ropelength toolkit."""
from __future__ import annotations
