"""Batch front-end: simulate, split, detect, evaluate, report.

Exit codes: 0 success, 1 usage error, 2 data/format error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .baseline_detector import DetectorParams, detect_streaks
from .catalog import CatalogError
from .dataset import (
    DatasetError,
    DatasetManifest,
    ManifestEntry,
    load_manifest,
    load_split,
    make_folds,
    read_annotation_boxes,
    read_pgm,
    resolve_entry_paths,
    save_manifest,
    save_split,
    write_frame,
)
from .evaluation import (
    EvaluationError,
    ap_report,
    load_detections,
    report_from_dict,
    report_to_dict,
    save_detections,
)
from .render import ConfigError, render_frame
from .scene import describe, load_inputs, load_scenario, plan_frames

log = logging.getLogger(__name__)

_DATA_ERRORS = (
    CatalogError,
    ConfigError,
    DatasetError,
    EvaluationError,
    OSError,
    json.JSONDecodeError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="streakbench", description=__doc__)
    parser.add_argument("--version", action="version", version=f"streakbench {__version__}")
    sub = parser.add_subparsers(dest="command")

    p_sim = sub.add_parser("simulate", help="render synthetic frames + annotations")
    p_sim.add_argument("--config", required=True, help="scenario config file")
    p_sim.add_argument("--count", type=int, required=True, help="number of frames")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument(
        "--interleaved",
        action="store_true",
        help="render two half-exposure fields interleaved by row",
    )
    p_sim.set_defaults(func=_cmd_simulate)

    p_split = sub.add_parser("split", help="k-fold split of the real images")
    p_split.add_argument("--manifest", required=True)
    p_split.add_argument("--folds", type=int, default=5)
    p_split.add_argument("--seed", type=int, default=0)
    p_split.add_argument("--out", required=True)
    p_split.set_defaults(func=_cmd_split)

    p_det = sub.add_parser("detect", help="run the classical baseline detector")
    p_det.add_argument("--images", required=True, help="manifest.json or a directory of PGMs")
    p_det.add_argument("--out", required=True)
    p_det.add_argument("--k-sigma", type=float, default=3.0)
    p_det.add_argument("--min-area", type=int, default=4)
    p_det.add_argument("--max-components", type=int, default=50)
    p_det.add_argument(
        "--elongation-min",
        type=float,
        default=1.2,
        help="principal-axis ratio below which compact components are star-like",
    )
    p_det.add_argument(
        "--point-area",
        type=int,
        default=9,
        help="area in px under which star-like components are dropped",
    )
    p_det.add_argument("--detector-name", default="classical-baseline")
    p_det.set_defaults(func=_cmd_detect)

    p_eval = sub.add_parser("evaluate", help="score a detection file against ground truth")
    p_eval.add_argument("--gt", required=True, help="ground-truth manifest.json")
    p_eval.add_argument("--det", required=True, help="detection file")
    p_eval.add_argument("--split", default=None, help="splits.json (optional)")
    p_eval.add_argument("--fold", type=int, default=None, help="test fold index")
    p_eval.add_argument("--out", required=True, help="report.json")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_rep = sub.add_parser("report", help="render report files as a text table")
    p_rep.add_argument("--inputs", nargs="+", required=True)
    p_rep.add_argument("--table", action="store_true", help="print the summary table")
    p_rep.set_defaults(func=_cmd_report)

    p_val = sub.add_parser("validate-config", help="check a scenario config, print derived FOV")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=_cmd_validate_config)

    return parser


def _cmd_simulate(args) -> int:
    from .render import render_interleaved  # local import keeps startup light

    cfg = load_scenario(args.config)
    stars, rsos, observer = load_inputs(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries: list[ManifestEntry] = []
    for plan in plan_frames(cfg, rsos, observer, args.count, args.seed):
        if args.interleaved:
            frame, _, _, _ = render_interleaved(plan.scene, stars, rsos, plan.epoch)
        else:
            frame = render_frame(plan.scene, stars, rsos, plan.epoch)
        image_name = f"frame_{plan.index:05d}.pgm"
        ann_name = f"frame_{plan.index:05d}.json"
        write_frame(frame, out / image_name, out / ann_name)
        entries.append(
            ManifestEntry(
                image_path=image_name,
                annotation_path=ann_name,
                source="synthetic",
                width=frame.width,
                height=frame.height,
            )
        )
    manifest = DatasetManifest(entries=entries, seed=args.seed)
    save_manifest(out / "manifest.json", manifest)
    print(f"simulated {len(entries)} frames into {out}")
    return 0


def _cmd_split(args) -> int:
    manifest = load_manifest(args.manifest)
    split = make_folds(manifest, k=args.folds, seed=args.seed)
    save_split(args.out, split)
    sizes = [len(split.fold_paths(f)) for f in range(split.fold_count)]
    print(f"split {sum(sizes)} real images into folds of sizes {sizes}")
    return 0


def _collect_images(images_arg: str) -> list[tuple[str, Path]]:
    source = Path(images_arg)
    if source.is_file():
        manifest = load_manifest(source)
        return [
            (Path(e.image_path).name, resolve_entry_paths(source, e)[0])
            for e in manifest.entries
        ]
    if source.is_dir():
        return [(p.name, p) for p in sorted(source.glob("*.pgm"))]
    raise DatasetError(f"{images_arg}: neither a manifest file nor a directory")


def _cmd_detect(args) -> int:
    params = DetectorParams(
        k_sigma=args.k_sigma,
        min_area_px=args.min_area,
        max_components=args.max_components,
        elongation_min=args.elongation_min,
        point_area_px=args.point_area,
    )
    per_image = {}
    for name, path in _collect_images(args.images):
        per_image[name] = detect_streaks(read_pgm(path), params)
    save_detections(args.out, {"detector": args.detector_name}, per_image)
    total = sum(len(dets) for dets in per_image.values())
    print(f"detected {total} candidates over {len(per_image)} images -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    if (args.split is None) != (args.fold is None):
        raise UsageError("--split and --fold must be given together")
    manifest = load_manifest(args.gt)
    entries = manifest.entries
    if args.split is not None:
        split = load_split(args.split)
        if not 0 <= args.fold < split.fold_count:
            raise EvaluationError(f"fold {args.fold} outside [0, {split.fold_count})")
        selected = set(split.fold_paths(args.fold))
        entries = [e for e in manifest.real_entries() if e.image_path in selected]
        if not entries:
            raise EvaluationError(f"fold {args.fold} selects no images")
    meta, detections = load_detections(args.det)
    per_image = {}
    for entry in entries:
        _, ann_path = resolve_entry_paths(args.gt, entry)
        name = Path(entry.image_path).name
        per_image[name] = (detections.get(name, []), read_annotation_boxes(ann_path))
    report = ap_report(per_image, meta=meta)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"images scored: {report.images_scored}")
    print(f"AP@[0.3:0.95] = {report.ap_range:.4f}")
    print(f"AP@0.3 = {report.ap_03:.4f}")
    print(f"AP@0.5 = {report.ap_05:.4f}")
    return 0


_TABLE_COLUMNS = ("detector", "AP@[0.3:0.95]", "AP@0.3", "AP@0.5", "GFLOPs", "Params(M)", "Time(ms)")


def _format_cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def _cmd_report(args) -> int:
    rows = []
    for input_path in args.inputs:
        with open(input_path, "r", encoding="utf-8") as fh:
            report = report_from_dict(json.load(fh))
        rows.append(
            (
                report.detector or Path(input_path).stem,
                report.ap_range,
                report.ap_03,
                report.ap_05,
                report.gflops,
                report.params_millions,
                report.time_ms,
            )
        )
    widths = [
        max(len(_TABLE_COLUMNS[i]), *(len(_format_cell(row[i])) for row in rows))
        for i in range(len(_TABLE_COLUMNS))
    ]
    header = "  ".join(name.ljust(widths[i]) for i, name in enumerate(_TABLE_COLUMNS))
    print(header)
    print("-" * len(header))
    for row in rows:
        print("  ".join(_format_cell(cell).ljust(widths[i]) for i, cell in enumerate(row)))
    return 0


def _cmd_validate_config(args) -> int:
    cfg = load_scenario(args.config)
    print(f"config OK: {args.config}")
    for line in describe(cfg):
        print(line)
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        print(parser.format_usage(), file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
