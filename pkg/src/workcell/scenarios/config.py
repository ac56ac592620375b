"""Scenario configuration: one JSON document wiring a whole cell together."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dialogue import KnowledgeBase, load_kb
from ..gateway import EndpointBinding, GatewayService, JobKind
from ..robot import RobotModel, load_model
from ..vision import CameraConfig, load_template_library
from ..vision.scene import Scene, SceneObject


class ScenarioError(ValueError):
    """Scenario document rejected; message names the offending path."""


@dataclass
class ScenarioConfig:
    name: str
    kb: KnowledgeBase
    model: RobotModel
    scene: Scene
    templates: dict[str, np.ndarray]
    camera: CameraConfig
    bindings: dict[str, EndpointBinding]
    detector_threshold: float = 0.7
    noise_amplitude: float = 0.0
    drop_zone: tuple[float, float, float] = (0.3, -0.1, 0.02)
    grasp_height: float = 0.02
    approach_offset: float = 0.05
    seed: int = 0
    extras: dict = field(default_factory=dict)


def _get(doc: dict, key: str, where: str = "scenario"):
    if key not in doc:
        raise ScenarioError(f"{where}: missing '{key}'")
    return doc[key]


def scene_from_dict(doc: dict) -> Scene:
    extent = _get(doc, "extent", "scene")
    objects = [
        SceneObject(
            id=str(rec["id"]),
            label=str(rec["label"]),
            position=(float(rec["position"][0]), float(rec["position"][1])),
            mass_kg=float(rec.get("mass_kg", 0.05)),
            template=str(rec.get("template", rec["label"])),
        )
        for rec in doc.get("objects", [])
    ]
    return Scene(
        extent=((float(extent[0][0]), float(extent[0][1])),
                (float(extent[1][0]), float(extent[1][1]))),
        objects=objects,
    )


def load_scenario(path: str | os.PathLike) -> ScenarioConfig:
    """Load and cross-validate a scenario file; paths resolve relative to it."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON: {exc}") from None
    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else (base / candidate).resolve()

    kb = load_kb(resolve(_get(doc, "kb")))
    model = load_model(resolve(_get(doc, "robot_model")))
    templates = load_template_library(resolve(_get(doc, "templates")))
    camera_doc = _get(doc, "camera")
    camera = CameraConfig(
        width=int(_get(camera_doc, "width", "camera")),
        height=int(_get(camera_doc, "height", "camera")),
        origin=(float(camera_doc["origin"][0]), float(camera_doc["origin"][1])),
        pixels_per_meter=float(_get(camera_doc, "pixels_per_meter", "camera")),
    )
    scene = scene_from_dict(_get(doc, "scene"))
    bindings = {}
    for endpoint, rec in _get(doc, "endpoints").items():
        where = f"endpoints[{endpoint!r}]"
        try:
            kind = JobKind(_get(rec, "kind", where))
        except ValueError:
            raise ScenarioError(f"{where}.kind: unknown job kind {rec.get('kind')!r}") from None
        bindings[endpoint] = EndpointBinding(
            kind=kind,
            class_field=rec.get("class_field"),
            class_map=dict(rec.get("class_map", {})),
            defect_class=rec.get("defect_class"),
        )
    for form in kb.forms:
        if form.endpoint not in bindings:
            raise ScenarioError(f"form {form.id!r} endpoint {form.endpoint!r} not bound")
    drop_zone = tuple(float(v) for v in _get(doc, "drop_zone"))
    if len(drop_zone) != 3:
        raise ScenarioError("drop_zone: expected [x, y, z]")
    if math.hypot(drop_zone[0], drop_zone[1], drop_zone[2]) > model.reach_m:
        raise ScenarioError("drop_zone: outside the robot reach envelope")
    for obj in scene.objects:
        if obj.template not in templates:
            raise ScenarioError(f"scene object {obj.id!r}: unknown template {obj.template!r}")
    return ScenarioConfig(
        name=str(doc.get("name", path.stem)),
        kb=kb,
        model=model,
        scene=scene,
        templates=templates,
        camera=camera,
        bindings=bindings,
        detector_threshold=float(doc.get("detector_threshold", 0.7)),
        noise_amplitude=float(doc.get("noise_amplitude", 0.0)),
        drop_zone=drop_zone,
        grasp_height=float(doc.get("grasp_height", 0.02)),
        approach_offset=float(doc.get("approach_offset", 0.05)),
        seed=int(doc.get("seed", 0)),
        extras=dict(doc.get("extras", {})),
    )


def build_service(config: ScenarioConfig, *, seed: int | None = None,
                  start_executor: bool = True) -> GatewayService:
    return GatewayService(
        kb=config.kb,
        model=config.model,
        scene=config.scene.copy(),
        templates=config.templates,
        camera=config.camera,
        bindings=config.bindings,
        detector_threshold=config.detector_threshold,
        noise_amplitude=config.noise_amplitude,
        drop_zone=config.drop_zone,
        grasp_height=config.grasp_height,
        approach_offset=config.approach_offset,
        seed=config.seed if seed is None else seed,
        start_executor=start_executor,
    )


def data_path(*parts: str) -> Path:
    """Path into the shipped data directory (bundled KBs, scenarios, templates)."""
    return Path(__file__).resolve().parent.parent / "data" / Path(*parts)
