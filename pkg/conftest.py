from __future__ import annotations

import os
import sys

here = os.path.dirname(os.path.abspath(__file__))
src_path = os.path.join(here, "src")
if src_path not in sys.path:
    sys.path.insert(0, src_path)

DATA_DIR = os.path.join(here, "data")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running brute-force or full-grid checks")
