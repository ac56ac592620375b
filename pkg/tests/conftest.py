from __future__ import annotations

import numpy as np
import pytest

from workcell.dialogue import load_kb
from workcell.robot import default_model
from workcell.scenarios import data_path
from workcell.vision import CameraConfig, load_template_library
from workcell.vision.scene import Scene, SceneObject


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def coffee_kb():
    return load_kb(data_path("kb", "coffee.json"))


@pytest.fixture(scope="session")
def templates():
    return load_template_library(data_path("templates"))


@pytest.fixture(scope="session")
def camera():
    return CameraConfig(width=96, height=96, origin=(0.22, -0.12), pixels_per_meter=400.0)


@pytest.fixture(scope="session")
def workspace_extent():
    return ((0.22, -0.12), (0.46, 0.12))


@pytest.fixture()
def pod_scene(workspace_extent):
    return Scene(
        extent=workspace_extent,
        objects=[
            SceneObject("pod-dark-1", "pod_dark", (0.40, 0.06), 0.03, "pod_dark"),
            SceneObject("pod-light-1", "pod_light", (0.40, -0.04), 0.03, "pod_light"),
        ],
    )


def brute_force_ncc(patch: np.ndarray, template: np.ndarray) -> float:
    """Independent NCC oracle: plain loops over the definition."""
    assert patch.shape == template.shape
    n = patch.size
    pm = sum(float(v) for v in patch.flat) / n
    tm = sum(float(v) for v in template.flat) / n
    num = 0.0
    pvar = 0.0
    tvar = 0.0
    for p, t in zip(patch.flat, template.flat):
        num += (p - pm) * (t - tm)
        pvar += (p - pm) ** 2
        tvar += (t - tm) ** 2
    denom = (pvar * tvar) ** 0.5
    if denom < 1e-12:
        return 0.0
    return max(-1.0, min(1.0, num / denom))


def brute_force_match_map(raster: np.ndarray, template: np.ndarray) -> np.ndarray:
    th, tw = template.shape
    h, w = raster.shape
    out = np.zeros((h - th + 1, w - tw + 1))
    for y in range(out.shape[0]):
        for x in range(out.shape[1]):
            out[y, x] = brute_force_ncc(raster[y : y + th, x : x + tw], template)
    return out
