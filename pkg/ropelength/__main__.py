"""Allow ``python -m ropelength``."""
from __future__ import annotations

import sys

from ropelength.cli import main

sys.exit(main())
