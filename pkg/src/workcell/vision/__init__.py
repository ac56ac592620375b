"""Synthetic-frame vision pipeline: render, match, post-process, calibrate."""

from .boxes import Box, Detection, box_area, iou, nms, validate_box
from .calib import Calibration, DegenerateConfiguration, calibrate, calibration_for_camera, pixel_to_robot
from .detect import DimensionMismatch, detect, local_maxima, match_map, ncc
from .evaluate import Annotation, AnnotationSet, evaluate, load_annotations, save_annotations
from .raster import (
    load_template_library,
    pgm_bytes,
    pgm_from_bytes,
    read_pgm,
    read_template,
    validate_raster,
    write_pgm,
    write_template,
)
from .render import CameraConfig, render, stamp_origin
from .scene import Scene, SceneObject

__all__ = [
    "Annotation",
    "AnnotationSet",
    "Box",
    "Calibration",
    "CameraConfig",
    "DegenerateConfiguration",
    "Detection",
    "DimensionMismatch",
    "Scene",
    "SceneObject",
    "box_area",
    "calibrate",
    "calibration_for_camera",
    "detect",
    "evaluate",
    "iou",
    "load_annotations",
    "load_template_library",
    "local_maxima",
    "match_map",
    "ncc",
    "nms",
    "pgm_bytes",
    "pgm_from_bytes",
    "pixel_to_robot",
    "read_pgm",
    "read_template",
    "render",
    "save_annotations",
    "stamp_origin",
    "validate_box",
    "validate_raster",
    "write_pgm",
    "write_template",
]
