from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Annotated, Literal

from cyclopts import Parameter

from config import PipelineConfig, load_config
from ingest.contract import Semantic

_FIELD_TO_SEMANTIC = {
    "road_surface": Semantic.RoadSurface,
    "road_side": Semantic.RoadSide,
    "road_lane": Semantic.RoadLane,
    "road_sign": Semantic.RoadSign,
    "road_light": Semantic.RoadLight,
    "guardrail": Semantic.Guardrail,
}


@dataclass
class EpsBySemantic:
    road_surface: float | None = None
    road_side: float | None = None
    road_lane: float | None = None
    road_sign: float | None = None
    road_light: float | None = None
    guardrail: float | None = None


@dataclass
class MinPtsBySemantic:
    road_surface: int | None = None
    road_side: int | None = None
    road_lane: int | None = None
    road_sign: int | None = None
    road_light: int | None = None
    guardrail: int | None = None


def _set(values) -> dict[str, object]:
    return {
        _FIELD_TO_SEMANTIC[f.name].name: getattr(values, f.name)
        for f in fields(values)
        if getattr(values, f.name) is not None
    }


@Parameter(name="*")
@dataclass
class StageOptions:
    """Flags shared by every pipeline command; each one overrides its key of the --config file."""

    config: Path | None = None
    "JSON pipeline configuration (see `schema`)."

    out_dir: Path | None = None
    "Root of the stage folders (default $TWIN_OUT_DIR or ./out)."

    threads: int | None = None
    "Worker threads per stage."

    mesh_format: Annotated[Literal["obj", "ply"] | None, Parameter(name="--format")] = None
    "Mesh output format."

    segment_id: str | None = None

    grid_size: float | None = None
    "Square grid cell size for plane-like assets, m."

    dh: float | None = None
    "Pole slab height, m."

    dl: float | None = None
    "Light chunk length, m."

    rays: int | None = None
    "Rays per pole/light ring."

    alpha_fine: float | None = None
    alpha_coarse: float | None = None

    eps: EpsBySemantic = field(default_factory=EpsBySemantic)
    min_pts: MinPtsBySemantic = field(default_factory=MinPtsBySemantic)

    def overrides(self) -> dict:
        out: dict = {}
        extract: dict = {}
        if self.out_dir is not None:
            out["out_dir"] = str(self.out_dir)
        if self.threads is not None:
            out["threads"] = self.threads
        if self.mesh_format is not None:
            out["mesh_format"] = self.mesh_format
        if self.segment_id is not None:
            out["segment_id"] = self.segment_id
        if self.grid_size is not None:
            extract["grid_w"] = extract["grid_l"] = self.grid_size
        for key, value in (("dh", self.dh), ("dl", self.dl), ("n_rays", self.rays),
                           ("alpha_fine", self.alpha_fine), ("alpha_coarse", self.alpha_coarse)):
            if value is not None:
                extract[key] = value
        if extract:
            out["extract"] = extract
        cluster: dict = {}
        for name, value in _set(self.eps).items():
            cluster.setdefault(name, {})["eps"] = value
        for name, value in _set(self.min_pts).items():
            cluster.setdefault(name, {})["min_pts"] = value
        if cluster:
            out["cluster"] = cluster
        return out

    def load(self, **extra) -> PipelineConfig:
        overrides = self.overrides()
        overrides.update(extra)
        return load_config(self.config, overrides)


def resolve(opts: StageOptions | None, **extra) -> PipelineConfig:
    return (opts or StageOptions()).load(**extra)
