from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from geostore.contract import Polygon3D


class Plane(str, Enum):
    """Projection plane; `missing` is the axis the lift fills back in."""
    XY = "XY"
    XZ = "XZ"
    YZ = "YZ"

    @property
    def axes(self) -> tuple[int, int]:
        return {"XY": (0, 1), "XZ": (0, 2), "YZ": (1, 2)}[self.value]

    @property
    def missing(self) -> int:
        return {"XY": 2, "XZ": 1, "YZ": 0}[self.value]


class LiftParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    radius: float = Field(0.15, gt=0)                  # neighbourhood radius r, meters
    k_nearest: int = Field(8, ge=1)                    # K-nearest fallback when nothing lies within r
    pair_k: int | None = Field(None, ge=1)             # V2 top/bottom count; None -> max(1, N // 5)


@dataclass(frozen=True)
class PolygonPair:
    """One front/back polygon pair with index-aligned rings."""
    front: Polygon3D
    back: Polygon3D
