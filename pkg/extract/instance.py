from __future__ import annotations

import logging

from cluster.contract import ClusterParams
from cluster.instances import split_parts
from errors import DataError, InvalidInstanceError
from geostore.contract import GeometryRecord, RecordKind, RecordMeta
from ingest.contract import LabeledCloud, PLANE_LIKE, Part, Semantic
from .contract import ExtractConfig
from .guardrail import extract_guardrail
from .plane import extract_plane_like
from .pole import extract_light, extract_panel, extract_pole

logger = logging.getLogger(__name__)

_PART_OPS = {
    Part.Pole: ("Poles", "Pole", extract_pole),
    Part.Panel: ("Panels", "Panel", extract_panel),
    Part.Light: ("Lights", "Light", extract_light),
}


def extract_instance(
    instance: LabeledCloud,
    cfg: ExtractConfig,
    part_params: ClusterParams,
    *,
    segment_id: str = "seg0",
    instance_id: int = 0,
) -> GeometryRecord:
    """
    Dispatch on the instance's semantic and build its record.

    Pole-like parts that fail become record warnings and are left out; the record still comes
    out as long as one pole survives.
    """
    semantic = instance.semantic_label

    def meta(warnings=()):
        return RecordMeta(semantic.name, instance_id, segment_id, tuple(warnings))

    if semantic in PLANE_LIKE:
        return GeometryRecord(RecordKind.PlaneLike, meta(), multipolygon=extract_plane_like(instance, cfg)).validate()

    if semantic is Semantic.Guardrail:
        segments = tuple(g.segment for g in extract_guardrail(instance, cfg))
        return GeometryRecord(RecordKind.Guardrail, meta(), guardrails=segments).validate()

    groups: dict[Part, list] = {p: [] for p in Part}
    warnings: list[str] = []
    for part, clouds in split_parts(instance, part_params).items():
        group, key, op = _PART_OPS[part]
        for i, cloud in enumerate(clouds):
            try:
                groups[part].append(op(cloud, cfg))
            except DataError as exc:
                msg = f"{group}: {key.lower()} part {i} ({len(cloud)} points) skipped: {exc}"
                logger.warning("%s_%d %s", semantic.name, instance_id, msg)
                warnings.append(msg)
    if not groups[Part.Pole]:
        raise InvalidInstanceError(f"{semantic.name}_{instance_id}: no pole part could be extracted")
    return GeometryRecord(
        RecordKind.PoleLike,
        meta(warnings),
        poles=tuple(groups[Part.Pole]),
        panels=tuple(groups[Part.Panel]),
        lights=tuple(groups[Part.Light]),
    ).validate()
