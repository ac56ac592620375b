"""Synthetic top-down camera: rasterize a scene into a grayscale frame.

The camera is a fixed orthographic projection of the table plane.  Pixel
(px, py) covers the square of side 1/pixels_per_meter whose top-left
corner sits at ``origin + (px, py) / pixels_per_meter``; +x meters maps
to +x pixels (columns), +y meters to +y pixels (rows).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import Scene


@dataclass(frozen=True)
class CameraConfig:
    width: int
    height: int
    origin: tuple[float, float]
    pixels_per_meter: float

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("camera dimensions must be positive")
        if self.pixels_per_meter <= 0:
            raise ValueError("pixels_per_meter must be positive")

    def project(self, point: tuple[float, float]) -> tuple[float, float]:
        """Workspace meters -> continuous pixel coordinates (px, py)."""
        return (
            (point[0] - self.origin[0]) * self.pixels_per_meter,
            (point[1] - self.origin[1]) * self.pixels_per_meter,
        )

    def meters_per_pixel(self) -> float:
        return 1.0 / self.pixels_per_meter


def stamp_origin(camera: CameraConfig, position: tuple[float, float],
                 template: np.ndarray) -> tuple[int, int]:
    """Integer top-left pixel at which a template lands for an object center.

    The template is centered on the pixel that contains the projected
    point, so the stamped box center stays within half a pixel of the
    true projection.
    """
    px, py = camera.project(position)
    th, tw = template.shape
    return int(math.floor(px)) - tw // 2, int(math.floor(py)) - th // 2


def render(scene: Scene, camera: CameraConfig,
           templates: dict[str, np.ndarray],
           noise_amplitude: float = 0.0,
           seed: int | None = None) -> np.ndarray:
    """Deterministic frame: 0.0 background, one template stamp per object.

    Objects are stamped in id order (later stamps overwrite) and clipped
    at the frame edge.  Optional uniform noise in ``±noise_amplitude`` is
    drawn from a generator seeded with ``seed``; the result is clipped
    back to [0, 1].
    """
    frame = np.zeros((camera.height, camera.width), dtype=float)
    for obj in sorted(scene.objects, key=lambda o: o.id):
        template = templates[obj.template]
        th, tw = template.shape
        x0, y0 = stamp_origin(camera, obj.position, template)
        # clip stamp to the frame
        fx0, fy0 = max(x0, 0), max(y0, 0)
        fx1, fy1 = min(x0 + tw, camera.width), min(y0 + th, camera.height)
        if fx0 >= fx1 or fy0 >= fy1:
            continue
        frame[fy0:fy1, fx0:fx1] = template[fy0 - y0 : fy1 - y0, fx0 - x0 : fx1 - x0]
    if noise_amplitude > 0.0:
        rng = np.random.default_rng(seed)
        frame = frame + rng.uniform(-noise_amplitude, noise_amplitude, frame.shape)
        frame = np.clip(frame, 0.0, 1.0)
    return frame
