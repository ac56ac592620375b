"""Pixel-to-workspace calibration: a least-squares 2x3 affine fit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boxes import Box

# linear part must be comfortably invertible
_MIN_DET = 1e-9
# centered pixel spread below this is treated as collinear
_COLLINEAR_EPS = 1e-9


class DegenerateConfiguration(ValueError):
    pass


@dataclass(frozen=True)
class Calibration:
    """Affine pixel -> meters map: ``meters = matrix @ [px, py, 1]``."""

    matrix: np.ndarray  # shape (2, 3)
    residual_rms: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (2, 3):
            raise ValueError(f"calibration matrix must be 2x3, got {m.shape}")
        if abs(np.linalg.det(m[:, :2])) <= _MIN_DET:
            raise DegenerateConfiguration("calibration linear part is singular")
        object.__setattr__(self, "matrix", m)

    def apply(self, pixel: tuple[float, float]) -> tuple[float, float]:
        x, y = self.matrix @ np.array([pixel[0], pixel[1], 1.0])
        return float(x), float(y)


def calibrate(pixels: np.ndarray, meters: np.ndarray) -> Calibration:
    """Fit the affine map from >= 3 non-collinear pixel/workspace pairs.

    ``pixels`` and ``meters`` are (n, 2) arrays of corresponding points.
    Raises DegenerateConfiguration for < 3 pairs or collinear pixels.
    """
    pixels = np.asarray(pixels, dtype=float)
    meters = np.asarray(meters, dtype=float)
    if pixels.ndim != 2 or pixels.shape[1] != 2 or pixels.shape != meters.shape:
        raise ValueError("expected matching (n, 2) point arrays")
    n = pixels.shape[0]
    if n < 3:
        raise DegenerateConfiguration(f"need at least 3 point pairs, got {n}")
    centered = pixels - pixels.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=_COLLINEAR_EPS) < 2:
        raise DegenerateConfiguration("pixel points are collinear")
    design = np.hstack([pixels, np.ones((n, 1))])
    coeffs, _, _, _ = np.linalg.lstsq(design, meters, rcond=None)
    matrix = coeffs.T
    residuals = design @ coeffs - meters
    rms = float(np.sqrt(np.mean(np.sum(residuals**2, axis=1))))
    return Calibration(matrix=matrix, residual_rms=rms)


def pixel_to_robot(calibration: Calibration, box: Box) -> tuple[float, float]:
    """Workspace point (meters) under the box center."""
    x0, y0, x1, y1 = box
    return calibration.apply(((x0 + x1) / 2.0, (y0 + y1) / 2.0))


def calibration_for_camera(camera) -> Calibration:
    """Exact inverse of a CameraConfig projection (no fitting)."""
    m = camera.meters_per_pixel()
    ox, oy = camera.origin
    return Calibration(matrix=np.array([[m, 0.0, ox], [0.0, m, oy]]))
