from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from errors import ValidationError

Vertex = tuple[float, float, float]
Ring = tuple[Vertex, ...]


def _ring(arr) -> Ring:
    a = np.asarray(arr, dtype=np.float64).reshape(-1, 3)
    return tuple((float(x), float(y), float(z)) for x, y, z in a.tolist())


@dataclass(frozen=True)
class Polygon3D:
    shell: Ring
    holes: tuple[Ring, ...] = ()

    @classmethod
    def from_arrays(cls, shell, holes=()) -> "Polygon3D":
        return cls(_ring(shell), tuple(_ring(h) for h in holes))

    @property
    def signature(self) -> tuple[int, tuple[int, ...]]:
        """Vertex counts of shell and holes; equal signatures mean index-aligned rings."""
        return len(self.shell), tuple(len(h) for h in self.holes)

    def shell_array(self) -> np.ndarray:
        return np.asarray(self.shell, dtype=np.float64).reshape(-1, 3)

    def rings(self) -> list[np.ndarray]:
        return [self.shell_array(), *(np.asarray(h, dtype=np.float64).reshape(-1, 3) for h in self.holes)]

    def map(self, fn) -> "Polygon3D":
        """Apply an (n, 3) -> (n, 3) array function to every ring."""
        rings = [fn(r) for r in self.rings()]
        return Polygon3D.from_arrays(rings[0], rings[1:])


MultiPolygon3D = tuple[Polygon3D, ...]


@dataclass(frozen=True)
class SurfacePair:
    """Front/back multipolygons in one-to-one vertex correspondence (guardrail segment, panel)."""
    front: MultiPolygon3D
    back: MultiPolygon3D

    def mismatch(self) -> str | None:
        if len(self.front) != len(self.back):
            return f"Front has {len(self.front)} polygon(s), Back has {len(self.back)}"
        for i, (f, b) in enumerate(zip(self.front, self.back)):
            if f.signature != b.signature:
                return f"Polygon_{i} vertex counts differ: Front {f.signature} vs Back {b.signature}"
        return None


class RecordKind(str, Enum):
    PlaneLike = "PlaneLike"
    Guardrail = "Guardrail"
    PoleLike = "PoleLike"


@dataclass(frozen=True)
class RecordMeta:
    semantic: str                       # Semantic name, e.g. "RoadSurface"
    instance_id: int
    segment_id: str = "seg0"
    warnings: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)   # unknown keys kept from parsed files


@dataclass(frozen=True)
class GeometryRecord:
    kind: RecordKind
    meta: RecordMeta
    multipolygon: MultiPolygon3D = ()
    guardrails: tuple[SurfacePair, ...] = ()
    poles: tuple[MultiPolygon3D, ...] = ()
    panels: tuple[SurfacePair, ...] = ()
    lights: tuple[MultiPolygon3D, ...] = ()

    @property
    def record_id(self) -> str:
        return f"{self.meta.segment_id}_{self.meta.semantic}_{self.meta.instance_id}"

    # ==== validation ====
    def validate(self) -> "GeometryRecord":
        """Raise ValidationError naming the first violated Data path."""
        if self.kind is RecordKind.PlaneLike:
            if self.guardrails or self.poles or self.panels or self.lights:
                raise ValidationError("Data", "plane-like record carries non-plane groups")
            _check_multipolygon(self.multipolygon, "Data.MultiPolygon")
        elif self.kind is RecordKind.Guardrail:
            if self.multipolygon or self.poles or self.panels or self.lights:
                raise ValidationError("Data", "guardrail record carries non-guardrail groups")
            if not self.guardrails:
                raise ValidationError("Data", "guardrail record has no Guardrail_i segment")
            for i, seg in enumerate(self.guardrails):
                _check_pair(seg, f"Data.Guardrail_{i}")
        else:
            if self.multipolygon or self.guardrails:
                raise ValidationError("Data", "pole-like record carries plane or guardrail groups")
            if not self.poles:
                raise ValidationError("Data.Poles", "pole-like record needs at least one pole")
            for i, pole in enumerate(self.poles):
                _check_multipolygon(pole, f"Data.Poles.Pole_{i}.MultiPolygon")
            for i, panel in enumerate(self.panels):
                _check_pair(panel, f"Data.Panels.Panel_{i}")
            for i, light in enumerate(self.lights):
                _check_multipolygon(light, f"Data.Lights.Light_{i}.MultiPolygon")
        return self


def _check_ring(ring: Ring, path: str, minimum: int = 3) -> None:
    if len(ring) < minimum:
        raise ValidationError(path, f"needs >= {minimum} vertices, got {len(ring)}")
    for v in ring:
        if len(v) != 3 or not all(math.isfinite(c) for c in v):
            raise ValidationError(path, f"bad vertex {list(v)}")


def _check_multipolygon(mp: MultiPolygon3D, path: str) -> None:
    if not mp:
        raise ValidationError(path, "no polygons")
    for i, poly in enumerate(mp):
        _check_ring(poly.shell, f"{path}.Polygon_{i}.Shell")
        for j, hole in enumerate(poly.holes):
            _check_ring(hole, f"{path}.Polygon_{i}.Holes[{j}]")


def _check_pair(pair: SurfacePair, path: str) -> None:
    problem = pair.mismatch()
    if problem:
        raise ValidationError(path, problem)
    _check_multipolygon(pair.front, f"{path}.Front.MultiPolygon")
    _check_multipolygon(pair.back, f"{path}.Back.MultiPolygon")
