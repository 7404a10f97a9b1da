"""Detection scoring: IoU matching, per-image precision and AP reports.

The AP reported here is the mean per-image precision at an IoU threshold,
averaged over a threshold grid for the range variant.  That is the
protocol this benchmark defines; it is deliberately NOT the PR-curve-area
AP of COCO/VOC, and no such number is emitted to avoid confusion.

Matching is greedy by detection score: each detection, in descending score
order (ties by ascending x then y), consumes the unmatched ground truth of
maximal IoU (ties by lowest index) and counts as a true positive iff that
IoU reaches the threshold.  A consumed ground truth cannot rematch, even
when the match failed the threshold.

Precision convention for images with ground truth but zero detections:
precision is 0, so silent misses are penalised.  Images with neither
detections nor ground truth are skipped entirely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

Box = tuple[float, float, float, float]

DEFAULT_THRESHOLD_GRID: tuple[float, ...] = tuple(
    round(0.30 + 0.05 * i, 2) for i in range(14)
)  # 0.30, 0.35, ..., 0.95


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Detection:
    box: Box
    score: float

    def __post_init__(self):
        x, y, w, h = self.box
        if w <= 0.0 or h <= 0.0:
            raise ValueError(f"box extents must be positive, got w={w!r} h={h!r}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score!r} outside [0, 1]")


@dataclass
class MetricsReport:
    ap_range: float
    ap_03: float
    ap_05: float
    per_threshold: dict[float, float]
    detector: str | None = None
    gflops: float | None = None
    params_millions: float | None = None
    time_ms: float | None = None
    images_scored: int = 0


def iou(a: Box, b: Box) -> float:
    """Intersection area over union area of two (x, y, w, h) boxes."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    ix = min(ax + aw, bx + bw) - max(ax, bx)
    iy = min(ay + ah, by + bh) - max(ay, by)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    return inter / (aw * ah + bw * bh - inter)


def match_detections(
    dets: list[Detection], gts: list[Box], tau: float
) -> tuple[int, int, list[tuple[int, int | None, float]]]:
    """Greedy score-ordered matching at IoU threshold ``tau``.

    Returns (TP, FP, matches) where matches lists, per detection in
    processing order, (original detection index, consumed gt index or
    None, achieved IoU).
    """
    if not 0.0 < tau <= 1.0:
        raise EvaluationError(f"IoU threshold {tau!r} outside (0, 1]")
    order = sorted(
        range(len(dets)),
        key=lambda i: (-dets[i].score, dets[i].box[0], dets[i].box[1]),
    )
    unmatched = set(range(len(gts)))
    tp = fp = 0
    matches: list[tuple[int, int | None, float]] = []
    for det_idx in order:
        if not unmatched:
            fp += 1
            matches.append((det_idx, None, 0.0))
            continue
        best_gt = min(unmatched)
        best_iou = -1.0
        for gt_idx in sorted(unmatched):
            value = iou(dets[det_idx].box, gts[gt_idx])
            if value > best_iou:
                best_iou = value
                best_gt = gt_idx
        unmatched.discard(best_gt)
        if best_iou >= tau:
            tp += 1
        else:
            fp += 1
        matches.append((det_idx, best_gt, best_iou))
    return tp, fp, matches


def precision_at(dets: list[Detection], gts: list[Box], tau: float) -> float | None:
    """Per-image precision TP/(TP+FP); None when the image contributes
    nothing (no detections and no ground truth)."""
    if not dets and not gts:
        return None
    if not dets:
        return 0.0
    tp, fp, _ = match_detections(dets, gts, tau)
    return tp / (tp + fp)


def ap_at_threshold(per_image: dict[str, tuple[list[Detection], list[Box]]], tau: float) -> float:
    precisions = [
        p
        for dets, gts in per_image.values()
        if (p := precision_at(dets, gts, tau)) is not None
    ]
    if not precisions:
        return 0.0
    return sum(precisions) / len(precisions)


def ap_report(
    per_image: dict[str, tuple[list[Detection], list[Box]]],
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLD_GRID,
    meta: dict | None = None,
) -> MetricsReport:
    """Score every image at every threshold and assemble the report.

    Complexity fields (GFLOPs, parameter count, inference time) are
    self-reported pass-through metadata from the detection file header;
    this harness cannot measure them for external detectors.
    """
    if not per_image:
        raise EvaluationError("at least one image is required")
    if not thresholds:
        raise EvaluationError("threshold grid must not be empty")
    for tau in thresholds:
        if not 0.0 < tau <= 1.0:
            raise EvaluationError(f"threshold {tau!r} outside (0, 1]")
    per_threshold = {tau: ap_at_threshold(per_image, tau) for tau in thresholds}
    meta = meta or {}
    contributing = sum(
        1 for dets, gts in per_image.values() if dets or gts
    )
    return MetricsReport(
        ap_range=sum(per_threshold.values()) / len(per_threshold),
        ap_03=ap_at_threshold(per_image, 0.3),
        ap_05=ap_at_threshold(per_image, 0.5),
        per_threshold=per_threshold,
        detector=meta.get("detector"),
        gflops=meta.get("gflops"),
        params_millions=meta.get("params_millions"),
        time_ms=meta.get("time_ms"),
        images_scored=contributing,
    )


# ---------------------------------------------------------------------------
# Detection file interface
# ---------------------------------------------------------------------------

def save_detections(
    path: str | Path,
    meta: dict,
    per_image: dict[str, list[Detection]],
) -> None:
    """External detection-file schema; any detector's output can be scored
    through this format."""
    doc = {
        "meta": meta,
        "images": [
            {
                "image": name,
                "detections": [
                    {
                        "x": det.box[0],
                        "y": det.box[1],
                        "w": det.box[2],
                        "h": det.box[3],
                        "score": det.score,
                    }
                    for det in dets
                ],
            }
            for name, dets in per_image.items()
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_detections(path: str | Path) -> tuple[dict, dict[str, list[Detection]]]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        per_image: dict[str, list[Detection]] = {}
        for image in doc["images"]:
            per_image[image["image"]] = [
                Detection(
                    box=(float(d["x"]), float(d["y"]), float(d["w"]), float(d["h"])),
                    score=float(d["score"]),
                )
                for d in image.get("detections", [])
            ]
        return dict(doc.get("meta", {})), per_image
    except (KeyError, TypeError) as exc:
        raise EvaluationError(f"{path}: malformed detection file ({exc})") from None


def report_to_dict(report: MetricsReport) -> dict:
    return {
        "ap_range": report.ap_range,
        "ap_03": report.ap_03,
        "ap_05": report.ap_05,
        "per_threshold": {f"{tau:.2f}": ap for tau, ap in report.per_threshold.items()},
        "detector": report.detector,
        "gflops": report.gflops,
        "params_millions": report.params_millions,
        "time_ms": report.time_ms,
        "images_scored": report.images_scored,
    }


def report_from_dict(doc: dict) -> MetricsReport:
    return MetricsReport(
        ap_range=float(doc["ap_range"]),
        ap_03=float(doc["ap_03"]),
        ap_05=float(doc["ap_05"]),
        per_threshold={float(k): float(v) for k, v in doc["per_threshold"].items()},
        detector=doc.get("detector"),
        gflops=doc.get("gflops"),
        params_millions=doc.get("params_millions"),
        time_ms=doc.get("time_ms"),
        images_scored=int(doc.get("images_scored", 0)),
    )
