#!/usr/bin/env python3
"""End-to-end benchmark demo on purely synthetic data.

Renders two independent synthetic sets, treats the second as the stand-in
"real" evaluation set, builds a 5-fold split over it, runs the classical
baseline detector, scores each fold, and prints the summary table.  The
mixing step is shown by printing each round's train composition; actual
detector training is outside this toolkit.
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent

from streakbench.cli import main as cli  # noqa: E402
from streakbench.dataset import build_training_round, load_manifest, load_split  # noqa: E402


def run(argv: list[str]) -> None:
    print(f"$ streakbench {' '.join(argv)}")
    code = cli(argv)
    if code != 0:
        sys.exit(code)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workdir", default="runs/demo")
    ap.add_argument("--config", default=str(REPO / "configs" / "swarm.cfg"))
    ap.add_argument("--synthetic-count", type=int, default=30)
    ap.add_argument("--eval-count", type=int, default=15)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)

    if not (REPO / "configs" / "demo_stars.txt").exists():
        subprocess.run(
            [sys.executable, str(REPO / "scripts" / "make_demo_inputs.py")], check=True
        )

    synth_dir = work / "synthetic"
    eval_dir = work / "eval"
    run(["simulate", "--config", args.config, "--count", str(args.synthetic_count),
         "--seed", str(args.seed), "--out", str(synth_dir)])
    run(["simulate", "--config", args.config, "--count", str(args.eval_count),
         "--seed", str(args.seed + 1), "--out", str(eval_dir)])

    # Relabel the evaluation set as "real" so it can be fold-split; in an
    # actual benchmark these entries come from sensor downlink.
    eval_manifest_path = eval_dir / "manifest.json"
    doc = json.loads(eval_manifest_path.read_text())
    for entry in doc["entries"]:
        entry["source"] = "real"
    eval_manifest_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    splits_path = work / "splits.json"
    run(["split", "--manifest", str(eval_manifest_path), "--folds", "5",
         "--seed", str(args.seed), "--out", str(splits_path)])

    manifest = load_manifest(eval_manifest_path)
    split = load_split(splits_path)
    synth_manifest = load_manifest(synth_dir / "manifest.json")
    pool = load_manifest(eval_manifest_path)
    pool.entries = manifest.entries + synth_manifest.entries
    for fold in range(split.fold_count):
        train, test = build_training_round(split, pool, fold)
        n_real = sum(1 for e in train if e.source == "real")
        n_synth = len(train) - n_real
        print(f"round {fold}: train = {n_real} real + {n_synth} synthetic, "
              f"test = {len(test)} real")

    det_path = work / "detections.json"
    # Pure elongation gating: with a star-rich field the point filter must
    # apply to components of any size, or bright stars flood the output.
    run(["detect", "--images", str(eval_manifest_path), "--out", str(det_path),
         "--k-sigma", "4.0", "--point-area", "1000000"])

    report_paths = []
    for fold in range(split.fold_count):
        report_path = work / f"report_fold{fold}.json"
        run(["evaluate", "--gt", str(eval_manifest_path), "--det", str(det_path),
             "--split", str(splits_path), "--fold", str(fold), "--out", str(report_path)])
        report_paths.append(str(report_path))

    run(["report", "--inputs", *report_paths, "--table"])
    print(
        "\nnote: this scene is the hard regime on purpose (streaks a few px long\n"
        "among ~9000 catalogue stars); the classical baseline scoring low here is\n"
        "the expected outcome that motivates learning-based detectors.  The\n"
        "acceptance suite exercises the same loop on an easy regime where the\n"
        "baseline reaches AP@0.3 = 1.0 (pytest tests/test_acceptance.py)."
    )


if __name__ == "__main__":
    main()
