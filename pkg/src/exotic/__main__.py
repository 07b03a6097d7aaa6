from __future__ import annotations

import sys

from exotic.cli import main

sys.exit(main())
