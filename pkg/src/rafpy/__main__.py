from __future__ import annotations

import sys

from rafpy.cli import main

sys.exit(main())
