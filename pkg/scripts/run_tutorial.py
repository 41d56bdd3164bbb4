#!/usr/bin/env python3
"""Run the full Hochstetten-sand tutorial calibration.

Equivalent to

    sandcal tutorial/data/Input.txt --out runs/tutorial

Pass extra CLI flags through, e.g. ``--seed 12345 --workers 1`` for a
reproducible single-core run.
"""

import sys
from pathlib import Path

from sandcal.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    argv = [str(ROOT / "tutorial" / "data" / "Input.txt")]
    if "--out" not in sys.argv:
        argv += ["--out", str(ROOT / "runs" / "tutorial")]
    sys.exit(main(argv + sys.argv[1:]))
