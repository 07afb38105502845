"""
GeometryRecord <-> JSON.

Envelope:
    {"Meta": {"Schema": 1, "Units": "m", "Kind": ..., "Semantic": ..., "InstanceId": ...,
              "SegmentId": ..., "Warnings": [...]},
     "Data": <MultiPolygon | Guardrail_i ... | Poles/Panels/Lights>}

Every polygon is {"Shell": {"Vertices": [[x, y, z], ...]}, "Holes": {"Vertices": [[[x, y, z], ...], ...]}}.
There is no edge list; edges follow from vertex order.
"""

from __future__ import annotations

import json
import math
import re

from errors import ParseError, ValidationError
from .contract import GeometryRecord, Polygon3D, RecordKind, RecordMeta, SurfacePair

SCHEMA_VERSION = 1
UNITS = "m"

_META_KEYS = ("Schema", "Units", "Kind", "Semantic", "InstanceId", "SegmentId", "Warnings")
_DATA_KEYS = ("MultiPolygon", "Poles", "Panels", "Lights")
_GUARDRAIL_KEY = re.compile(r"^Guardrail_(\d+)$")


# =============================================================================
# Encode
# =============================================================================

def _num(v: float):
    return int(v) if v.is_integer() and abs(v) < 1e15 else v


def _ring_out(ring) -> list[list]:
    return [[_num(c) for c in v] for v in ring]


def _polygon_out(poly: Polygon3D) -> dict:
    return {
        "Shell": {"Vertices": _ring_out(poly.shell)},
        "Holes": {"Vertices": [_ring_out(h) for h in poly.holes]},
    }


def _multipolygon_out(mp) -> dict:
    return {"MultiPolygon": {f"Polygon_{i}": _polygon_out(p) for i, p in enumerate(mp)}}


def _pair_out(pair: SurfacePair) -> dict:
    return {"Front": _multipolygon_out(pair.front), "Back": _multipolygon_out(pair.back)}


def record_to_dict(record: GeometryRecord) -> dict:
    record.validate()
    meta = {
        "Schema": SCHEMA_VERSION,
        "Units": UNITS,
        "Kind": record.kind.value,
        "Semantic": record.meta.semantic,
        "InstanceId": record.meta.instance_id,
        "SegmentId": record.meta.segment_id,
        "Warnings": list(record.meta.warnings),
    }
    meta.update({k: v for k, v in record.meta.extra.items() if k not in meta})

    if record.kind is RecordKind.PlaneLike:
        data = _multipolygon_out(record.multipolygon)
    elif record.kind is RecordKind.Guardrail:
        data = {f"Guardrail_{i}": _pair_out(seg) for i, seg in enumerate(record.guardrails)}
    else:
        data = {"Poles": {f"Pole_{i}": _multipolygon_out(p) for i, p in enumerate(record.poles)}}
        if record.panels:
            data["Panels"] = {f"Panel_{i}": _pair_out(p) for i, p in enumerate(record.panels)}
        if record.lights:
            data["Lights"] = {f"Light_{i}": _multipolygon_out(p) for i, p in enumerate(record.lights)}
    return {"Meta": meta, "Data": data}


def to_json(record: GeometryRecord) -> bytes:
    """Deterministic UTF-8 JSON; floats use the shortest round-trip repr."""
    return json.dumps(record_to_dict(record), separators=(",", ":"), ensure_ascii=False, allow_nan=False).encode("utf-8")


# =============================================================================
# Decode
# =============================================================================

def _expect(obj, typ, path: str, what: str):
    if not isinstance(obj, typ):
        raise ValidationError(path, f"expected {what}, got {type(obj).__name__}")
    return obj


def _vertex(v, path: str):
    if not isinstance(v, list) or len(v) != 3 or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v):
        raise ValidationError(path, f"expected [x, y, z], got {v!r}")
    out = tuple(float(c) for c in v)
    if not all(math.isfinite(c) for c in out):
        raise ValidationError(path, "non-finite coordinate")
    return out


def _ring_in(vertices, path: str):
    _expect(vertices, list, path, "a vertex list")
    ring = tuple(_vertex(v, f"{path}[{i}]") for i, v in enumerate(vertices))
    if len(ring) < 3:
        raise ValidationError(path, f"needs >= 3 vertices, got {len(ring)}")
    return ring


def _polygon_in(obj, path: str) -> Polygon3D:
    _expect(obj, dict, path, "an object")
    shell = _expect(obj.get("Shell"), dict, f"{path}.Shell", "an object")
    if "Vertices" not in shell:
        raise ValidationError(f"{path}.Shell", "missing Vertices")
    holes_obj = obj.get("Holes", {"Vertices": []})
    _expect(holes_obj, dict, f"{path}.Holes", "an object")
    holes = _expect(holes_obj.get("Vertices", []), list, f"{path}.Holes.Vertices", "a list of rings")
    return Polygon3D(
        _ring_in(shell["Vertices"], f"{path}.Shell"),
        tuple(_ring_in(h, f"{path}.Holes[{j}]") for j, h in enumerate(holes)),
    )


def _numbered(obj: dict, prefix: str, path: str) -> list:
    """Values of `<prefix>_<i>` keys in document order; other keys are rejected."""
    out = []
    for key, value in obj.items():
        if not re.fullmatch(rf"{prefix}_\d+", key):
            raise ValidationError(f"{path}.{key}", f"unexpected key (wanted {prefix}_<i>)")
        out.append((f"{path}.{key}", value))
    return out


def _multipolygon_in(obj, path: str) -> tuple[Polygon3D, ...]:
    _expect(obj, dict, path, "an object")
    mp = _expect(obj.get("MultiPolygon"), dict, f"{path}.MultiPolygon", "an object")
    polys = tuple(_polygon_in(v, p) for p, v in _numbered(mp, "Polygon", f"{path}.MultiPolygon"))
    if not polys:
        raise ValidationError(f"{path}.MultiPolygon", "no polygons")
    return polys


def _pair_in(obj, path: str) -> SurfacePair:
    _expect(obj, dict, path, "an object")
    for side in ("Front", "Back"):
        if side not in obj:
            raise ValidationError(path, f"missing {side}")
    pair = SurfacePair(_multipolygon_in(obj["Front"], f"{path}.Front"), _multipolygon_in(obj["Back"], f"{path}.Back"))
    problem = pair.mismatch()
    if problem:
        raise ValidationError(path, problem)
    return pair


def _infer_kind(data: dict) -> RecordKind:
    if "MultiPolygon" in data:
        return RecordKind.PlaneLike
    if "Poles" in data:
        return RecordKind.PoleLike
    if any(_GUARDRAIL_KEY.match(k) for k in data):
        return RecordKind.Guardrail
    raise ValidationError("Data", "cannot tell record kind (no MultiPolygon, Guardrail_i or Poles)")


def record_from_dict(doc) -> GeometryRecord:
    _expect(doc, dict, "$", "an object")
    if "Data" in doc:
        data = _expect(doc["Data"], dict, "Data", "an object")
        meta_in = _expect(doc.get("Meta", {}), dict, "Meta", "an object")
        extra = {k: v for k, v in doc.items() if k not in ("Meta", "Data")}
    else:                                       # bare Table 1 object
        data, meta_in, extra = doc, {}, {}
    extra.update({k: v for k, v in meta_in.items() if k not in _META_KEYS})

    kind_name = meta_in.get("Kind")
    try:
        kind = RecordKind(kind_name) if kind_name is not None else _infer_kind(data)
    except ValueError:
        raise ValidationError("Meta.Kind", f"unknown kind {kind_name!r}") from None

    groups: dict = {}
    if kind is RecordKind.PlaneLike:
        groups["multipolygon"] = _multipolygon_in(data, "Data")
        known = {"MultiPolygon"}
    elif kind is RecordKind.Guardrail:
        segs = [(k, v) for k, v in data.items() if _GUARDRAIL_KEY.match(k)]
        if not segs:
            raise ValidationError("Data", "guardrail record has no Guardrail_i segment")
        groups["guardrails"] = tuple(_pair_in(v, f"Data.{k}") for k, v in segs)
        known = {k for k, _ in segs}
    else:
        poles = _expect(data.get("Poles"), dict, "Data.Poles", "an object")
        groups["poles"] = tuple(_multipolygon_in(v, p) for p, v in _numbered(poles, "Pole", "Data.Poles"))
        if "Panels" in data:
            panels = _expect(data["Panels"], dict, "Data.Panels", "an object")
            groups["panels"] = tuple(_pair_in(v, p) for p, v in _numbered(panels, "Panel", "Data.Panels"))
        if "Lights" in data:
            lights = _expect(data["Lights"], dict, "Data.Lights", "an object")
            groups["lights"] = tuple(_multipolygon_in(v, p) for p, v in _numbered(lights, "Light", "Data.Lights"))
        known = {"Poles", "Panels", "Lights"}
    extra.update({k: v for k, v in data.items() if k not in known and k not in _DATA_KEYS})

    warnings = meta_in.get("Warnings", [])
    _expect(warnings, list, "Meta.Warnings", "a list")
    instance_id = meta_in.get("InstanceId", 0)
    if not isinstance(instance_id, int) or isinstance(instance_id, bool):
        raise ValidationError("Meta.InstanceId", f"expected an integer, got {instance_id!r}")
    meta = RecordMeta(
        semantic=str(meta_in.get("Semantic", "")),
        instance_id=instance_id,
        segment_id=str(meta_in.get("SegmentId", "seg0")),
        warnings=tuple(str(w) for w in warnings),
        extra=extra,
    )
    return GeometryRecord(kind=kind, meta=meta, **groups).validate()


def from_json(raw: bytes | str) -> GeometryRecord:
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"record is not valid JSON: {exc}") from None
    return record_from_dict(doc)
