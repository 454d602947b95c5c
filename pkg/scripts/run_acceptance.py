"""Run the ten acceptance checks and print one line each (exit 1 on any failure).

    python3 scripts/run_acceptance.py
"""

import runpy
from pathlib import Path

if __name__ == "__main__":
    runpy.run_path(str(Path(__file__).resolve().parents[1] / "tests" / "test_acceptance.py"),
                   run_name="__main__")
