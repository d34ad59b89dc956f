"""Allow ``python -m qes_singular``."""

import sys

from .cli import main

sys.exit(main())
