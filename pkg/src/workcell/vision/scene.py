"""Workspace scene model: a rectangular table patch holding small objects."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class SceneObject:
    """One object on the table; position is its center (x, y) in meters."""

    id: str
    label: str
    position: tuple[float, float]
    mass_kg: float
    template: str

    def __post_init__(self):
        if self.mass_kg <= 0:
            raise ValueError(f"object {self.id!r}: mass must be positive")


@dataclass
class Scene:
    """Mutable object container; extent is ((x_min, y_min), (x_max, y_max))."""

    extent: tuple[tuple[float, float], tuple[float, float]]
    objects: list[SceneObject] = field(default_factory=list)

    def __post_init__(self):
        (x0, y0), (x1, y1) = self.extent
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"bad extent {self.extent}")
        seen: set[str] = set()
        for obj in self.objects:
            if obj.id in seen:
                raise ValueError(f"duplicate object id {obj.id!r}")
            seen.add(obj.id)
            if not self.contains(obj.position):
                raise ValueError(f"object {obj.id!r} at {obj.position} outside extent")

    def contains(self, point: tuple[float, float]) -> bool:
        (x0, y0), (x1, y1) = self.extent
        return x0 <= point[0] <= x1 and y0 <= point[1] <= y1

    def get(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise KeyError(object_id)

    def nearest(self, point: tuple[float, float], radius: float) -> SceneObject | None:
        """Closest object within ``radius`` of ``point``; id order breaks ties."""
        best: SceneObject | None = None
        best_key: tuple[float, str] | None = None
        for obj in self.objects:
            d = math.dist(obj.position, point)
            if d <= radius:
                key = (d, obj.id)
                if best_key is None or key < best_key:
                    best, best_key = obj, key
        return best

    def move(self, object_id: str, position: tuple[float, float]) -> None:
        self.get(object_id).position = (float(position[0]), float(position[1]))

    def copy(self) -> "Scene":
        return Scene(
            extent=self.extent,
            objects=[
                SceneObject(o.id, o.label, o.position, o.mass_kg, o.template)
                for o in self.objects
            ],
        )
