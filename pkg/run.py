"""Entry point for the ropelength command-line tool."""
from __future__ import annotations

import sys

from ropelength.cli import main

if __name__ == "__main__":
    sys.exit(main())
