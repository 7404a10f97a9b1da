"""Dataset serialization, manifests, and cross-validation folds.

Images are written as 16-bit binary PGM (dependency-free, bit-exact) and
annotations as one JSON document per image; the same box schema serves
ground truth and detections.  Manifests carry real/synthetic provenance so
fold assignment and train/test mixing can guarantee that synthetic imagery
never leaks into a test set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .render import Frame, StreakAnnotation

PGM_MAXVAL = 65535


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    image_path: str
    annotation_path: str
    source: str  # "real" | "synthetic"
    width: int
    height: int

    def __post_init__(self):
        if self.source not in ("real", "synthetic"):
            raise DatasetError(f"source must be real|synthetic, got {self.source!r}")


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    seed: int = 0

    def __post_init__(self):
        paths = [e.image_path for e in self.entries]
        if len(paths) != len(set(paths)):
            raise DatasetError("duplicate image paths in manifest")

    def real_entries(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.source == "real"]

    def synthetic_entries(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.source == "synthetic"]


@dataclass
class FoldSplit:
    """Fold index per real image; synthetic images carry no fold."""

    fold_count: int
    assignments: dict[str, int]
    seed: int = 0

    def fold_paths(self, fold: int) -> list[str]:
        return [path for path, f in self.assignments.items() if f == fold]


# ---------------------------------------------------------------------------
# PGM + annotation files
# ---------------------------------------------------------------------------

def write_pgm(path: str | Path, dn: np.ndarray) -> None:
    """16-bit binary PGM, big-endian sample order."""
    height, width = dn.shape
    header = f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(dn, dtype=">u2").tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":  # header comment
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if len(tokens) != 4 or tokens[0] != b"P5":
        raise DatasetError(f"{path}: not a binary PGM")
    width, height, maxval = (int(t) for t in tokens[1:])
    pos += 1  # single whitespace after maxval
    if maxval != PGM_MAXVAL:
        raise DatasetError(f"{path}: expected 16-bit maxval {PGM_MAXVAL}, got {maxval}")
    expected = 2 * width * height
    raster = data[pos : pos + expected]
    if len(raster) != expected:
        raise DatasetError(f"{path}: truncated raster ({len(raster)} of {expected} bytes)")
    return np.frombuffer(raster, dtype=">u2").reshape(height, width).astype(np.uint16)


def write_pgm_preview(path: str | Path, dn: np.ndarray) -> None:
    """8-bit preview normalised to the max DN, for ordinary image viewers."""
    height, width = dn.shape
    peak = max(int(dn.max()), 1)
    scaled = (dn.astype(np.float64) * (255.0 / peak)).round().astype(np.uint8)
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(scaled.tobytes())


def _integer_box(ann: StreakAnnotation) -> tuple[int, int, int, int]:
    # Outer integer hull of the continuous box, so containment is preserved.
    x = int(math.floor(ann.x))
    y = int(math.floor(ann.y))
    w = max(1, int(math.ceil(ann.x + ann.w)) - x)
    h = max(1, int(math.ceil(ann.y + ann.h)) - y)
    return x, y, w, h


def annotations_to_dict(frame: Frame, image_name: str) -> dict:
    objects = []
    for ann in frame.annotations:
        x, y, w, h = _integer_box(ann)
        objects.append(
            {
                "x": x,
                "y": y,
                "w": w,
                "h": h,
                "rso_id": ann.rso_id,
                "magnitude": round(ann.apparent_magnitude, 4),
            }
        )
    return {
        "image": image_name,
        "width": frame.width,
        "height": frame.height,
        "objects": objects,
    }


def write_frame(frame: Frame, image_path: str | Path, annotation_path: str | Path) -> None:
    """Write the quantised raster as 16-bit PGM plus its annotation JSON."""
    image_path = Path(image_path)
    write_pgm(image_path, frame.dn)
    doc = annotations_to_dict(frame, image_path.name)
    with open(annotation_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_annotation_boxes(path: str | Path) -> list[tuple[float, float, float, float]]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return [
        (float(o["x"]), float(o["y"]), float(o["w"]), float(o["h"]))
        for o in doc.get("objects", [])
    ]


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------

def save_manifest(path: str | Path, manifest: DatasetManifest) -> None:
    doc = {
        "seed": manifest.seed,
        "entries": [
            {
                "image_path": e.image_path,
                "annotation_path": e.annotation_path,
                "source": e.source,
                "width": e.width,
                "height": e.height,
            }
            for e in manifest.entries
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path: str | Path) -> DatasetManifest:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        entries = [ManifestEntry(**entry) for entry in doc["entries"]]
        return DatasetManifest(entries=entries, seed=int(doc.get("seed", 0)))
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"{path}: malformed manifest ({exc})") from None


def resolve_entry_paths(manifest_path: str | Path, entry: ManifestEntry) -> tuple[Path, Path]:
    """Manifest paths are stored relative to the manifest file."""
    base = Path(manifest_path).parent
    return base / entry.image_path, base / entry.annotation_path


# ---------------------------------------------------------------------------
# Folds and training rounds
# ---------------------------------------------------------------------------

def make_folds(manifest: DatasetManifest, k: int = 5, seed: int = 0) -> FoldSplit:
    """Deterministic k-fold split of the real images only.

    Shuffle by seed, assign round-robin: fold sizes differ by at most one.
    """
    if k < 2:
        raise DatasetError(f"fold count must be >= 2, got {k}")
    real = manifest.real_entries()
    if len(real) < k:
        raise DatasetError(f"need at least {k} real images for {k} folds, have {len(real)}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(real))
    assignments = {real[int(idx)].image_path: pos % k for pos, idx in enumerate(order)}
    return FoldSplit(fold_count=k, assignments=assignments, seed=seed)


def build_training_round(
    split: FoldSplit,
    manifest: DatasetManifest,
    test_fold: int,
    synthetic_count: int | None = None,
) -> tuple[list[ManifestEntry], list[ManifestEntry]]:
    """(train, test) for one cross-validation round.

    Test is the real images of ``test_fold``; train is every other real
    image plus the first ``synthetic_count`` synthetic images (all of them
    by default).  Synthetic images never enter a test set.
    """
    if not 0 <= test_fold < split.fold_count:
        raise DatasetError(f"test fold {test_fold} outside [0, {split.fold_count})")
    synthetic = manifest.synthetic_entries()
    if synthetic_count is None:
        synthetic_count = len(synthetic)
    if not 0 <= synthetic_count <= len(synthetic):
        raise DatasetError(
            f"synthetic count {synthetic_count} outside [0, {len(synthetic)}]"
        )
    train: list[ManifestEntry] = []
    test: list[ManifestEntry] = []
    for entry in manifest.real_entries():
        if split.assignments[entry.image_path] == test_fold:
            test.append(entry)
        else:
            train.append(entry)
    train.extend(synthetic[:synthetic_count])
    return train, test


def save_split(path: str | Path, split: FoldSplit) -> None:
    doc = {
        "fold_count": split.fold_count,
        "seed": split.seed,
        "assignments": split.assignments,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_split(path: str | Path) -> FoldSplit:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return FoldSplit(
            fold_count=int(doc["fold_count"]),
            assignments={k: int(v) for k, v in doc["assignments"].items()},
            seed=int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"{path}: malformed split file ({exc})") from None
