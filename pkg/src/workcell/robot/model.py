"""Arm description: DH table, joint limits, payload and gripper geometry."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_PAYLOAD_KG = 4.0
DEFAULT_GRASP_RADIUS_M = 0.02
DEFAULT_MAX_OPEN_M = 0.08


class ModelError(ValueError):
    """Robot model config rejected; message carries the offending path."""


@dataclass(frozen=True)
class JointDef:
    """One revolute joint in standard DH convention (theta is the variable)."""

    a: float
    alpha: float
    d: float
    limit_min: float
    limit_max: float
    max_speed: float  # rad per simulation tick

    def __post_init__(self):
        if not self.limit_min < self.limit_max:
            raise ModelError(f"joint limits [{self.limit_min}, {self.limit_max}] inverted")
        if self.max_speed <= 0:
            raise ModelError("max_speed must be positive")


@dataclass(frozen=True)
class GripperSpec:
    max_open: float = DEFAULT_MAX_OPEN_M
    grasp_radius: float = DEFAULT_GRASP_RADIUS_M


@dataclass(frozen=True)
class RobotModel:
    name: str
    joints: tuple[JointDef, ...]
    payload_kg: float = DEFAULT_PAYLOAD_KG
    reach_m: float = 0.6
    gripper: GripperSpec = field(default_factory=GripperSpec)

    def __post_init__(self):
        if len(self.joints) != 6:
            raise ModelError(f"DH table must have exactly 6 rows, got {len(self.joints)}")
        if self.payload_kg <= 0:
            raise ModelError("payload_kg must be positive")
        if self.reach_m <= 0:
            raise ModelError("reach_m must be positive")

    @property
    def limits_min(self):
        return [j.limit_min for j in self.joints]

    @property
    def limits_max(self):
        return [j.limit_max for j in self.joints]

    def within_limits(self, joints) -> bool:
        return all(
            j.limit_min <= float(q) <= j.limit_max for j, q in zip(self.joints, joints)
        )


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ModelError(f"{where}: missing '{key}'")
    return doc[key]


def _finite(value, where: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ModelError(f"{where}: not a number: {value!r}") from None
    if not math.isfinite(value):
        raise ModelError(f"{where}: not finite: {value!r}")
    return value


def model_from_dict(doc: dict, name: str = "robot") -> RobotModel:
    rows = _require(doc, "dh", "robot model")
    if not isinstance(rows, list) or len(rows) != 6:
        raise ModelError(f"dh: expected a 6-row table, got {len(rows) if isinstance(rows, list) else type(rows).__name__}")
    joints = []
    for i, row in enumerate(rows):
        where = f"dh[{i}]"
        limits = _require(row, "limits", where)
        if not isinstance(limits, list) or len(limits) != 2:
            raise ModelError(f"{where}.limits: expected [min, max]")
        joints.append(
            JointDef(
                a=_finite(_require(row, "a", where), f"{where}.a"),
                alpha=_finite(_require(row, "alpha", where), f"{where}.alpha"),
                d=_finite(_require(row, "d", where), f"{where}.d"),
                limit_min=_finite(limits[0], f"{where}.limits[0]"),
                limit_max=_finite(limits[1], f"{where}.limits[1]"),
                max_speed=_finite(_require(row, "max_speed", where), f"{where}.max_speed"),
            )
        )
    gripper_doc = doc.get("gripper", {})
    gripper = GripperSpec(
        max_open=_finite(gripper_doc.get("max_open", DEFAULT_MAX_OPEN_M), "gripper.max_open"),
        grasp_radius=_finite(
            gripper_doc.get("grasp_radius", DEFAULT_GRASP_RADIUS_M), "gripper.grasp_radius"
        ),
    )
    return RobotModel(
        name=str(doc.get("name", name)),
        joints=tuple(joints),
        payload_kg=_finite(doc.get("payload_kg", DEFAULT_PAYLOAD_KG), "payload_kg"),
        reach_m=_finite(_require(doc, "reach_m", "robot model"), "reach_m"),
        gripper=gripper,
    )


def load_model(path: str | os.PathLike) -> RobotModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON: {exc}") from None
    try:
        return model_from_dict(doc, name=path.stem)
    except ModelError as exc:
        raise ModelError(f"{path}: {exc}") from None


def default_model() -> RobotModel:
    """The shipped small 4 kg-payload arm ("cr4ia_like")."""
    return load_model(Path(__file__).resolve().parent.parent / "data" / "robots" / "cr4ia_like.json")
