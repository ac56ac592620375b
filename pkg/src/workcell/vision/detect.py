"""Template matching by zero-mean normalized cross-correlation (NCC)."""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .boxes import Detection, nms

DEFAULT_SCORE_THRESHOLD = 0.7
DEFAULT_NMS_IOU = 0.5

# denominators below this are treated as zero variance
_VAR_EPS = 1e-12


class DimensionMismatch(ValueError):
    pass


def ncc(patch: np.ndarray, template: np.ndarray) -> float:
    """NCC score in [-1, 1] of two equal-shaped patches.

    Both inputs are de-meaned before correlating, which makes the score
    invariant to gain/offset changes of either side.  If either side has
    (numerically) zero variance the score is defined as 0.
    """
    patch = np.asarray(patch, dtype=float)
    template = np.asarray(template, dtype=float)
    if patch.shape != template.shape:
        raise DimensionMismatch(f"patch {patch.shape} vs template {template.shape}")
    p = patch - patch.mean()
    t = template - template.mean()
    denom = np.sqrt(np.sum(p * p) * np.sum(t * t))
    if denom < _VAR_EPS:
        return 0.0
    return float(np.clip(np.sum(p * t) / denom, -1.0, 1.0))


def match_map(raster: np.ndarray, template: np.ndarray) -> np.ndarray:
    """NCC of the template against every stride-1 window of the raster.

    Output shape is ``(H - th + 1, W - tw + 1)``; entry [y, x] is
    ``ncc(raster[y:y+th, x:x+tw], template)``.
    """
    raster = np.asarray(raster, dtype=float)
    template = np.asarray(template, dtype=float)
    th, tw = template.shape
    if raster.ndim != 2 or raster.shape[0] < th or raster.shape[1] < tw:
        raise DimensionMismatch(
            f"raster {raster.shape} smaller than template {template.shape}"
        )
    t = template - template.mean()
    t_ss = float(np.sum(t * t))
    windows = sliding_window_view(raster, (th, tw))
    n = th * tw
    win_sum = windows.sum(axis=(-2, -1))
    win_ss = np.sum(windows * windows, axis=(-2, -1)) - win_sum * win_sum / n
    # zero-mean template makes the window mean drop out of the numerator
    num = np.einsum("ijkl,kl->ij", windows, t)
    denom = np.sqrt(np.maximum(win_ss, 0.0) * t_ss)
    scores = np.zeros_like(num)
    ok = denom >= _VAR_EPS
    scores[ok] = num[ok] / denom[ok]
    return np.clip(scores, -1.0, 1.0)


def local_maxima(scores: np.ndarray, threshold: float) -> list[tuple[int, int]]:
    """(x, y) positions scoring >= threshold that dominate their 8-neighborhood.

    A position survives if no neighbor scores higher and no equal-scoring
    neighbor precedes it in (x, y) order, so plateaus keep their smallest
    coordinate only.  Returned in (x, y) order.
    """
    h, w = scores.shape
    padded = np.full((h + 2, w + 2), -np.inf)
    padded[1:-1, 1:-1] = scores
    keep: list[tuple[int, int]] = []
    candidates = np.argwhere(scores >= threshold)
    for y, x in candidates:
        center = scores[y, x]
        dominated = False
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                nb = padded[y + 1 + dy, x + 1 + dx]
                if nb > center:
                    dominated = True
                elif nb == center and (x + dx, y + dy) < (x, y):
                    dominated = True
            if dominated:
                break
        if not dominated:
            keep.append((int(x), int(y)))
    keep.sort()
    return keep


def detect(raster: np.ndarray, templates: dict[str, np.ndarray],
           threshold: float = DEFAULT_SCORE_THRESHOLD,
           nms_iou: float = DEFAULT_NMS_IOU) -> list[Detection]:
    """Slide every class template over the raster and return NMS-filtered hits.

    Each local score maximum >= threshold becomes a detection whose box is
    the template footprint at that offset.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside (0, 1]")
    detections: list[Detection] = []
    for label, template in sorted(templates.items()):
        th, tw = template.shape
        if raster.shape[0] < th or raster.shape[1] < tw:
            continue
        scores = match_map(raster, template)
        for x, y in local_maxima(scores, threshold):
            detections.append(
                Detection(
                    box=(float(x), float(y), float(x + tw), float(y + th)),
                    label=label,
                    score=float(scores[y, x]),
                )
            )
    return nms(detections, nms_iou)
