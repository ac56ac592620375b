"""Detection scoring against hand-authored ground truth annotations."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .boxes import Box, Detection, iou, validate_box


@dataclass(frozen=True)
class Annotation:
    box: Box
    label: str

    def __post_init__(self):
        validate_box(self.box)


@dataclass(frozen=True)
class AnnotationSet:
    image_id: str
    annotations: tuple[Annotation, ...]


def evaluate(detections: list[Detection], annotations: AnnotationSet | list[Annotation],
             iou_threshold: float = 0.5) -> tuple[float, float]:
    """(precision, recall) under greedy score-ordered matching.

    A detection is a true positive iff it overlaps an unmatched same-class
    annotation with IoU >= ``iou_threshold``; each annotation matches at
    most once.  Empty detections give precision 1.0 by convention, and
    empty annotations give recall 1.0 likewise.
    """
    truths = list(annotations.annotations) if isinstance(annotations, AnnotationSet) else list(annotations)
    ordered = sorted(detections, key=lambda d: (-d.score, d.box[0], d.box[1]))
    matched = [False] * len(truths)
    tp = 0
    for det in ordered:
        best_i, best_iou = -1, 0.0
        for i, truth in enumerate(truths):
            if matched[i] or truth.label != det.label:
                continue
            overlap = iou(det.box, truth.box)
            if overlap >= iou_threshold and overlap > best_iou:
                best_i, best_iou = i, overlap
        if best_i >= 0:
            matched[best_i] = True
            tp += 1
    precision = tp / len(detections) if detections else 1.0
    recall = tp / len(truths) if truths else 1.0
    return precision, recall


def load_annotations(path: str | os.PathLike) -> AnnotationSet:
    """Read one image's ground truth from the documented JSON format."""
    doc = json.loads(Path(path).read_text())
    return annotation_set_from_dict(doc)


def annotation_set_from_dict(doc: dict) -> AnnotationSet:
    try:
        image_id = doc["image_id"]
        records = doc["annotations"]
    except (KeyError, TypeError):
        raise ValueError("annotation document needs 'image_id' and 'annotations'") from None
    annotations = tuple(
        Annotation(box=tuple(float(v) for v in rec["box"]), label=str(rec["label"]))
        for rec in records
    )
    return AnnotationSet(image_id=str(image_id), annotations=annotations)


def save_annotations(annotations: AnnotationSet, path: str | os.PathLike) -> None:
    doc = {
        "image_id": annotations.image_id,
        "annotations": [
            {"box": list(a.box), "label": a.label} for a in annotations.annotations
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
