from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ingest.contract import Semantic
from .distance import TriangleIndex

logger = logging.getLogger(__name__)

ASSETS = [s.name for s in Semantic]


@dataclass(frozen=True)
class DistanceStats:
    count: int
    avg: float          # meters
    std: float          # meters, population

    @classmethod
    def of(cls, d: np.ndarray) -> "DistanceStats":
        if len(d) == 0:
            return cls(0, float("nan"), float("nan"))
        return cls(int(len(d)), float(d.mean()), float(d.std()))

    def as_dict(self) -> dict:
        def clean(v):
            return None if np.isnan(v) else round(v, 9)
        return {"count": self.count, "avg_m": clean(self.avg), "std_m": clean(self.std)}


@dataclass(frozen=True)
class InstanceDistance:
    name: str
    asset: str
    stats: DistanceStats


@dataclass(frozen=True)
class DistanceReport:
    assets: dict[str, DistanceStats]
    overall: DistanceStats
    instances: list[InstanceDistance] = field(default_factory=list)
    excluded: list[str] = field(default_factory=list)

    def table(self) -> pd.DataFrame:
        """Avg/Std rows, one column per asset plus Mean, in centimeters (2 decimals)."""
        cols = ASSETS + ["Mean"]
        stats = [self.assets.get(a, DistanceStats(0, float("nan"), float("nan"))) for a in ASSETS] + [self.overall]
        df = pd.DataFrame(
            [[s.avg * 100 for s in stats], [s.std * 100 for s in stats]],
            index=["Avg", "Std"],
            columns=cols,
        )
        return df.round(2)

    def to_dict(self) -> dict:
        return {
            "units": "m",
            "assets": {a: s.as_dict() for a, s in self.assets.items()},
            "overall": self.overall.as_dict(),
            "instances": [{"name": i.name, "asset": i.asset, **i.stats.as_dict()} for i in self.instances],
            "excluded": list(self.excluded),
        }


def evaluate(instances, meshes) -> DistanceReport:
    """
    Unsigned distance of every GT point to its own instance's meshes.

    `instances`: sequence of (name, Semantic, points (n, 3)); `meshes`: name -> list of Mesh.
    Instances without meshes are excluded and listed in the report.
    """
    per_asset: dict[str, list[np.ndarray]] = {a: [] for a in ASSETS}
    rows, excluded = [], []
    for name, semantic, points in instances:
        group = [m for m in meshes.get(name, []) if len(m)]
        if not group:
            logger.warning("%s: no mesh, excluded from evaluation", name)
            excluded.append(name)
            continue
        d = TriangleIndex.from_meshes(group).query(points)
        asset = Semantic(semantic).name
        per_asset[asset].append(d)
        rows.append(InstanceDistance(name, asset, DistanceStats.of(d)))
        logger.debug("%s: %d points, avg %.4f m", name, len(d), float(d.mean()) if len(d) else float("nan"))

    merged = {a: np.concatenate(v) if v else np.zeros(0) for a, v in per_asset.items()}
    assets = {a: DistanceStats.of(d) for a, d in merged.items() if len(d)}
    overall = DistanceStats.of(np.concatenate(list(merged.values())))
    if excluded:
        logger.warning("%d instance(s) excluded from evaluation", len(excluded))
    return DistanceReport(assets, overall, rows, excluded)


# =============================================================================
# Timing
# =============================================================================

TIMING_COLUMNS = ["asset", "extract_s", "mesh_s", "total_s"]


@dataclass(frozen=True)
class TimingReport:
    extract: dict[str, float]       # asset -> seconds
    mesh: dict[str, float]
    length_m: float | None = None
    pipeline_s: float | None = None  # wall clock of the whole run when known

    @property
    def extract_total(self) -> float:
        return float(sum(self.extract.values()))

    @property
    def mesh_total(self) -> float:
        return float(sum(self.mesh.values()))

    @property
    def total(self) -> float:
        return self.extract_total + self.mesh_total

    @property
    def speed_mps(self) -> float | None:
        """Twinned road length per second of pipeline time."""
        seconds = self.pipeline_s or self.total
        if not self.length_m or seconds <= 0:
            return None
        return self.length_m / seconds

    def table(self) -> pd.DataFrame:
        rows = [
            {"asset": a, "extract_s": self.extract.get(a, 0.0), "mesh_s": self.mesh.get(a, 0.0)}
            for a in ASSETS
        ]
        rows.append({"asset": "Total", "extract_s": self.extract_total, "mesh_s": self.mesh_total})
        df = pd.DataFrame(rows, columns=TIMING_COLUMNS[:3])
        df["total_s"] = df["extract_s"] + df["mesh_s"]
        return df.round(3)

    def to_dict(self) -> dict:
        return {
            "extract_s": {a: round(self.extract.get(a, 0.0), 6) for a in ASSETS},
            "mesh_s": {a: round(self.mesh.get(a, 0.0), 6) for a in ASSETS},
            "extract_total_s": round(self.extract_total, 6),
            "mesh_total_s": round(self.mesh_total, 6),
            "total_s": round(self.total, 6),
            "pipeline_s": None if self.pipeline_s is None else round(self.pipeline_s, 6),
            "length_m": None if self.length_m is None else round(self.length_m, 3),
            "speed_mps": None if self.speed_mps is None else round(self.speed_mps, 6),
        }


def timing(extract_seconds: dict, mesh_seconds: dict, *, length_m: float | None = None, pipeline_s: float | None = None) -> TimingReport:
    """Assemble per-asset seconds (asset name -> seconds) into a report; missing assets count as 0."""
    return TimingReport(
        {a: float(extract_seconds.get(a, 0.0)) for a in ASSETS},
        {a: float(mesh_seconds.get(a, 0.0)) for a in ASSETS},
        length_m,
        pipeline_s,
    )
