#!/usr/bin/env python3
"""Run the full offline comparison on the bundled mini-benchmark.

Profiles the passing snippets (perf_reps defaults to 5), writes stage
artifacts plus report.json / report.md under out/minibench/, and prints the
rendered Markdown. Takes well under a minute on an idle machine.

Usage:  python scripts/run_mini_regression.py [out_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from genregress.cli import main  # noqa: E402

FIXTURES = REPO / "fixtures" / "minibench"


def run() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else REPO / "out" / "minibench"
    rc = main(
        [
            "run", "--offline",
            "--benchmark", str(FIXTURES / "benchmark.jsonl"),
            "--store-a", str(FIXTURES / "store_a"),
            "--store-b", str(FIXTURES / "store_b"),
            "--out", str(out_dir),
        ]
    )
    if rc == 0:
        print()
        print((out_dir / "report.md").read_text(encoding="utf-8"))
    return rc


if __name__ == "__main__":
    sys.exit(run())
