#!/usr/bin/env python3
"""Run the bundled reference sweep and draw its figures. Run from the project root."""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import config  # noqa: E402
from fifogap import main  # noqa: E402

if not os.path.exists(config.REFERENCE_CONFIG_PATH):
    raise SystemExit(f"No config found at {config.REFERENCE_CONFIG_PATH}")

threads = os.environ.get('FIFOGAP_THREADS', str(os.cpu_count() or 1))
code = main(['sweep', config.REFERENCE_CONFIG_PATH, '--threads', threads])
if code == 0:
    code = main(['plot', os.path.join('generated', 'reference_sweep.csv'),
                 '--out', os.path.join('generated', 'figures'), '--dists'])
raise SystemExit(code)
