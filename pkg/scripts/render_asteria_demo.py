#!/usr/bin/env python3
"""Render the fixed-boresight validation scene (stars only) and write an
8-bit preview next to the 16-bit frame."""

from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent

from streakbench.cli import main as cli  # noqa: E402
from streakbench.dataset import read_pgm, write_pgm_preview  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/asteria")
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    if not (REPO / "configs" / "demo_stars.txt").exists():
        subprocess.run(
            [sys.executable, str(REPO / "scripts" / "make_demo_inputs.py")], check=True
        )

    out = Path(args.out)
    code = cli(["simulate", "--config", str(REPO / "configs" / "asteria.cfg"),
                "--count", "1", "--seed", str(args.seed), "--out", str(out)])
    if code != 0:
        sys.exit(code)
    frame_path = out / "frame_00000.pgm"
    preview = out / "frame_00000_preview.pgm"
    write_pgm_preview(preview, read_pgm(frame_path))
    print(f"frame: {frame_path}\npreview: {preview}")


if __name__ == "__main__":
    main()
