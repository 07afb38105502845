from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ingest.contract import Semantic

NOISE = -1


class ClusterParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    eps: float = Field(gt=0, description="neighborhood radius, meters")
    min_pts: int = Field(ge=1, description="minimum neighborhood size (the point itself included)")


class ClusterConfig(BaseModel):
    """Per-semantic DBSCAN parameters plus the part-level setting for pole-like instances."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    RoadSurface: ClusterParams = ClusterParams(eps=1.0, min_pts=10)
    RoadSide: ClusterParams = ClusterParams(eps=1.0, min_pts=10)
    RoadLane: ClusterParams = ClusterParams(eps=0.3, min_pts=6)
    RoadSign: ClusterParams = ClusterParams(eps=0.5, min_pts=10)
    RoadLight: ClusterParams = ClusterParams(eps=0.5, min_pts=10)
    Guardrail: ClusterParams = ClusterParams(eps=0.5, min_pts=10)
    parts: ClusterParams = ClusterParams(eps=0.15, min_pts=5)

    def per_semantic(self) -> dict[Semantic, ClusterParams]:
        return {s: getattr(self, s.name) for s in Semantic}


@dataclass(frozen=True, eq=False)
class Clustering:
    assignments: np.ndarray   # (n,) int64 cluster id or NOISE
    cluster_count: int
    core: np.ndarray          # (n,) bool

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == cluster_id)

    @property
    def noise_count(self) -> int:
        return int((self.assignments == NOISE).sum())
