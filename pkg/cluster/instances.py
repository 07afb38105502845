from __future__ import annotations

import logging
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from errors import ConfigError, InvalidInstanceError, UnlabeledPartsError
from ingest.contract import LabeledCloud, NO_PART, Part, POLE_LIKE, Semantic
from ingest.loader import save_cloud
from .contract import ClusterParams
from .core import dbscan

logger = logging.getLogger(__name__)


def _clusters(cloud: LabeledCloud, params: ClusterParams) -> list[LabeledCloud]:
    result = dbscan(cloud.points, params)
    clouds = [cloud.subset(result.members(cid)) for cid in range(result.cluster_count)]
    return sorted(clouds, key=lambda c: (float(c.points[:, 0].min()), float(c.points[:, 1].min())))


def split_instances(
    cloud: LabeledCloud, per_semantic_params: Mapping[Semantic, ClusterParams]
) -> list[tuple[Semantic, LabeledCloud]]:
    """Cluster every semantic class into instances, ordered by (semantic, min x, min y); noise dropped."""
    if len(cloud) == 0:
        raise InvalidInstanceError("cannot segment an empty cloud")
    instances: list[tuple[Semantic, LabeledCloud]] = []
    for semantic, sub in sorted(cloud.by_semantic().items()):
        params = per_semantic_params.get(semantic)
        if params is None:
            raise ConfigError(f"no cluster parameters for semantic {semantic.name}")
        found = _clusters(sub, params)
        logger.info("%s: %d points -> %d instances", semantic.name, len(sub), len(found))
        instances.extend((semantic, c) for c in found)
    return instances


def split_parts(instance: LabeledCloud, params: ClusterParams) -> dict[Part, list[LabeledCloud]]:
    semantic = instance.semantic_label
    if semantic not in POLE_LIKE:
        raise InvalidInstanceError(f"part split needs a RoadSign/RoadLight instance, got {semantic.name}")
    if (instance.part == NO_PART).any():
        raise UnlabeledPartsError(
            f"{int((instance.part == NO_PART).sum())} of {len(instance)} points have no part label"
        )
    parts: dict[Part, list[LabeledCloud]] = {}
    for part in Part:
        idx = np.flatnonzero(instance.part == part)
        if len(idx) == 0:
            continue
        found = _clusters(instance.subset(idx), params)
        if found:
            parts[part] = found
    if not parts.get(Part.Pole):
        raise InvalidInstanceError(f"{semantic.name} instance has no pole part")
    return parts


# =============================================================================
# Instance dump
# =============================================================================

def instance_names(instances: list[tuple[Semantic, LabeledCloud]]) -> list[str]:
    """`<semantic>_<index>` with the index counted per semantic."""
    seen: dict[Semantic, int] = {}
    names = []
    for semantic, _ in instances:
        idx = seen.get(semantic, 0)
        seen[semantic] = idx + 1
        names.append(f"{semantic.name}_{idx}")
    return names


def write_instances(instances: list[tuple[Semantic, LabeledCloud]], out_dir: str | Path) -> list[dict]:
    out_dir = Path(out_dir)
    entries = []
    for name, (semantic, cloud) in zip(instance_names(instances), instances):
        path = save_cloud(cloud, out_dir / f"{name}.csv")
        entries.append({
            "file": path.name,
            "name": name,
            "semantic": semantic.name,
            "index": int(name.rsplit("_", 1)[1]),
            "points": len(cloud),
        })
    return entries
