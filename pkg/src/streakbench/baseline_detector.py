"""Classical training-free streak detector.

Pipeline: robust background estimation (median / scaled MAD), k-sigma
thresholding, 8-connected component extraction, then an elongation filter
that drops small round blobs as star-like points.  Streak/star confusion
is the core difficulty of this detection task, so the point filter is
conservative and every threshold is exposed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .evaluation import Detection

MAD_TO_SIGMA = 1.4826


@dataclass(frozen=True)
class DetectorParams:
    k_sigma: float = 3.0
    min_area_px: int = 4
    max_components: int = 50
    # Components rounder than this AND smaller than point_area_px are
    # rejected as unresolved point sources (stars).
    elongation_min: float = 1.2
    point_area_px: int = 9
    # SNR at which the confidence score saturates to 1; arbitrary but
    # monotone, which is all greedy matching needs.
    snr_saturation: float = 20.0


def _elongation_ratio(rows: np.ndarray, cols: np.ndarray, weights: np.ndarray) -> float:
    """Ratio of principal-axis lengths of the intensity-weighted footprint."""
    total = weights.sum()
    if total <= 0.0 or len(rows) < 2:
        return 1.0
    mu_r = (weights * rows).sum() / total
    mu_c = (weights * cols).sum() / total
    dr = rows - mu_r
    dc = cols - mu_c
    cov_rr = (weights * dr * dr).sum() / total
    cov_cc = (weights * dc * dc).sum() / total
    cov_rc = (weights * dr * dc).sum() / total
    eigvals = np.linalg.eigvalsh(np.array([[cov_rr, cov_rc], [cov_rc, cov_cc]]))
    lo, hi = max(float(eigvals[0]), 0.0), max(float(eigvals[1]), 0.0)
    if hi <= 0.0:
        return 1.0
    return float(np.sqrt(hi / max(lo, 1e-12)))


def detect_streaks(
    image: np.ndarray, params: DetectorParams = DetectorParams()
) -> list[Detection]:
    """Detect elongated bright features in a single raster.

    Returns at most ``max_components`` detections, highest score first;
    scores map component SNR onto [0, 1].  A constant image (zero robust
    spread) yields an empty result rather than an error.  The detector is
    invariant to adding a constant to all pixels.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.size == 0:
        raise ValueError("image is empty")
    background = float(np.median(img))
    spread = MAD_TO_SIGMA * float(np.median(np.abs(img - background)))
    if spread == 0.0:
        return []
    threshold = background + params.k_sigma * spread
    mask = img > threshold
    labels, n_components = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))
    if n_components == 0:
        return []

    height, width = img.shape
    detections: list[Detection] = []
    for slc_index, slc in enumerate(ndimage.find_objects(labels), start=1):
        if slc is None:
            continue
        component = labels[slc] == slc_index
        area = int(component.sum())
        if area < params.min_area_px:
            continue
        rows_local, cols_local = np.nonzero(component)
        rows = rows_local + slc[0].start
        cols = cols_local + slc[1].start
        values = img[rows, cols]
        weights = values - background
        ratio = _elongation_ratio(
            rows.astype(np.float64), cols.astype(np.float64), weights
        )
        if ratio < params.elongation_min and area < params.point_area_px:
            continue
        snr = (float(values.mean()) - background) / spread
        score = float(np.clip(snr / params.snr_saturation, 0.0, 1.0))
        x0 = max(0, int(cols.min()) - 1)
        y0 = max(0, int(rows.min()) - 1)
        x1 = min(width, int(cols.max()) + 2)
        y1 = min(height, int(rows.max()) + 2)
        detections.append(Detection(box=(x0, y0, x1 - x0, y1 - y0), score=score))

    detections.sort(key=lambda d: (-d.score, d.box[0], d.box[1]))
    return detections[: params.max_components]
