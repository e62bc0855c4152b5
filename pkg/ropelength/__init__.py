"""Ropelength: thickness and ropelength of polygonal knots and links."""
from __future__ import annotations

__version__ = "1.0.0"
