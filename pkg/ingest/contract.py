from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import DataError


class Semantic(IntEnum):
    RoadSurface = 0
    RoadSide = 1
    RoadLane = 2
    RoadSign = 3
    RoadLight = 4
    Guardrail = 5

    @property
    def hyper(self) -> str:
        """Hyper-asset class: PlaneLike, PoleLike or Guardrail."""
        if self in PLANE_LIKE:
            return "PlaneLike"
        if self in POLE_LIKE:
            return "PoleLike"
        return "Guardrail"

    @classmethod
    def parse(cls, value: str | int) -> "Semantic":
        if isinstance(value, str) and not value.isdigit():
            try:
                return cls[value]
            except KeyError:
                raise DataError(f"unknown semantic name {value!r}") from None
        try:
            return cls(int(value))
        except ValueError:
            raise DataError(f"unknown semantic code {value!r}") from None


class Part(IntEnum):
    Pole = 0
    Panel = 1
    Light = 2


NO_PART = 255
PLANE_LIKE = frozenset({Semantic.RoadSurface, Semantic.RoadSide, Semantic.RoadLane})
POLE_LIKE = frozenset({Semantic.RoadSign, Semantic.RoadLight})


@dataclass(frozen=True, eq=False)
class LabeledCloud:
    points: np.ndarray      # (n, 3) float64, meters
    semantic: np.ndarray    # (n,) uint8 Semantic codes
    part: np.ndarray        # (n,) uint8 Part codes, NO_PART = none

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64).reshape(-1, 3)
        sem = np.ascontiguousarray(self.semantic, dtype=np.uint8).reshape(-1)
        part = np.ascontiguousarray(self.part, dtype=np.uint8).reshape(-1)
        if not (len(pts) == len(sem) == len(part)):
            raise DataError(f"label arrays do not match point count ({len(pts)}, {len(sem)}, {len(part)})")
        if not np.isfinite(pts).all():
            raise DataError("cloud contains non-finite coordinates")
        if len(sem) and sem.max() > max(Semantic):
            raise DataError(f"unknown semantic code {int(sem.max())}")
        labeled = part != NO_PART
        if labeled.any():
            if part[labeled].max() > max(Part):
                raise DataError(f"unknown part code {int(part[labeled].max())}")
            pole_like = np.isin(sem, [int(s) for s in POLE_LIKE])
            if (labeled & ~pole_like).any():
                raise DataError("part label on a point whose semantic is not RoadSign/RoadLight")
        for arr in (pts, sem, part):
            arr.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "semantic", sem)
        object.__setattr__(self, "part", part)

    @classmethod
    def from_arrays(cls, points, semantic, part=None) -> "LabeledCloud":
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        semantic = np.broadcast_to(np.asarray(semantic, dtype=np.uint8), (len(points),))
        if part is None:
            part = np.full(len(points), NO_PART, dtype=np.uint8)
        part = np.broadcast_to(np.asarray(part, dtype=np.uint8), (len(points),))
        return cls(points, semantic.copy(), part.copy())

    def __len__(self) -> int:
        return len(self.points)

    @property
    def xy(self) -> np.ndarray:
        return self.points[:, :2]

    @property
    def semantic_label(self) -> Semantic:
        """The single semantic of an instance cloud."""
        codes = np.unique(self.semantic)
        if len(codes) != 1:
            raise DataError(f"expected a single-semantic cloud, found codes {codes.tolist()}")
        return Semantic(int(codes[0]))

    def subset(self, index) -> "LabeledCloud":
        return LabeledCloud(self.points[index], self.semantic[index], self.part[index])

    def by_semantic(self) -> dict[Semantic, "LabeledCloud"]:
        """Partition into per-semantic sub-clouds (input order kept inside each)."""
        return {
            Semantic(int(code)): self.subset(np.flatnonzero(self.semantic == code))
            for code in np.unique(self.semantic)
        }

    def same_as(self, other: "LabeledCloud") -> bool:
        return (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.semantic, other.semantic)
            and np.array_equal(self.part, other.part)
        )


class PreprocessParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    voxel_size: float = Field(0.02, ge=0, description="meters; 0 disables downsampling")
    outlier_neighbors: int = Field(16, ge=1)
    outlier_std_ratio: float = Field(2.0, ge=0, description="0 disables outlier removal")
