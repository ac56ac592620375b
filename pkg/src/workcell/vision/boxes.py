"""Axis-aligned boxes, IoU and greedy non-maximum suppression.

Boxes are ``(x_min, y_min, x_max, y_max)`` in continuous pixel
coordinates: area = (x_max - x_min) * (y_max - y_min), no +1 fudge.
"""
from __future__ import annotations

from dataclasses import dataclass

Box = tuple[float, float, float, float]


@dataclass(frozen=True)
class Detection:
    """One detector hit: a box, the matched class label and its score."""

    box: Box
    label: str
    score: float

    def __post_init__(self):
        validate_box(self.box)
        if not -1.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [-1, 1]")

    @property
    def center(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.box
        return (x0 + x1) / 2.0, (y0 + y1) / 2.0


def validate_box(box: Box) -> None:
    x0, y0, x1, y1 = box
    if not (x0 < x1 and y0 < y1):
        raise ValueError(f"degenerate box {box}: need x_min < x_max and y_min < y_max")


def box_area(box: Box) -> float:
    x0, y0, x1, y1 = box
    return (x1 - x0) * (y1 - y0)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two valid boxes, in [0, 1]."""
    ix0 = max(a[0], b[0])
    iy0 = max(a[1], b[1])
    ix1 = min(a[2], b[2])
    iy1 = min(a[3], b[3])
    if ix0 >= ix1 or iy0 >= iy1:
        return 0.0
    inter = (ix1 - ix0) * (iy1 - iy0)
    union = box_area(a) + box_area(b) - inter
    return inter / union


def nms(detections: list[Detection], iou_threshold: float = 0.5) -> list[Detection]:
    """Greedy per-class suppression of overlapping detections.

    Keeps the highest-scoring box, drops same-class boxes overlapping it
    with IoU strictly above ``iou_threshold``, repeats.  Score ties break
    toward the smaller x_min, then y_min, which makes the result
    deterministic for any input order.
    """
    if not 0.0 <= iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold {iou_threshold} outside [0, 1]")
    ordered = sorted(detections, key=lambda d: (-d.score, d.box[0], d.box[1]))
    kept: list[Detection] = []
    for det in ordered:
        suppressed = any(
            k.label == det.label and iou(k.box, det.box) > iou_threshold for k in kept
        )
        if not suppressed:
            kept.append(det)
    return kept
