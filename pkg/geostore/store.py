from __future__ import annotations

import json
import logging
from pathlib import Path

import pandas as pd

from errors import MissingFileError, ParseError, ValidationError
from ingest.contract import Semantic
from .codec import from_json, to_json
from .contract import GeometryRecord

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
SIZE_COLUMNS = ["asset", "json_bytes", "mesh_bytes", "ratio"]


def record_filename(record: GeometryRecord) -> str:
    return f"{record.record_id}.json"


def write_record(record: GeometryRecord, out_dir: str | Path) -> Path:
    path = Path(out_dir) / record_filename(record)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(to_json(record))
    return path


def read_record(path: str | Path) -> GeometryRecord:
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"record file not found: {p}")
    try:
        return from_json(p.read_bytes())
    except ValidationError as exc:
        raise ValidationError(f"{p} {exc.path}", exc.message) from None
    except ParseError as exc:
        raise ParseError(f"{p}: {exc}") from None


def write_manifest(entries: list[dict], out_dir: str | Path, **fields) -> Path:
    """`{"files": [...], **fields}` with sorted keys and 2-space indent."""
    path = Path(out_dir) / MANIFEST
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"files": entries, **fields}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_manifest(stage_dir: str | Path) -> dict:
    path = Path(stage_dir) / MANIFEST
    if not path.is_file():
        raise MissingFileError(f"manifest not found: {path} (run the previous stage first)")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("files"), list):
        raise ParseError(f"{path}: expected an object with a 'files' list")
    return doc


# =============================================================================
# Storage comparison
# =============================================================================

def asset_of(path: Path) -> str:
    """Semantic name from `<segment>_<semantic>_<index>.<ext>`; 'Other' if it does not parse."""
    parts = path.stem.rsplit("_", 2)
    if len(parts) == 3 and parts[1] in Semantic.__members__:
        return parts[1]
    return "Other"


def _sizes(paths) -> dict[str, int]:
    out: dict[str, int] = {}
    for raw in paths:
        p = Path(raw)
        if not p.is_file():
            raise MissingFileError(f"size report: file not found: {p}")
        out[asset_of(p)] = out.get(asset_of(p), 0) + p.stat().st_size
    return out


def size_report(json_paths, mesh_paths) -> pd.DataFrame:
    """Per-asset byte totals of the JSON records vs. the exported meshes, plus a Total row."""
    js, ms = _sizes(json_paths), _sizes(mesh_paths)
    assets = [s.name for s in Semantic if s.name in js or s.name in ms]
    assets += sorted(a for a in set(js) | set(ms) if a not in assets)
    if not assets:
        return pd.DataFrame(columns=SIZE_COLUMNS)

    rows = [{"asset": a, "json_bytes": js.get(a, 0), "mesh_bytes": ms.get(a, 0)} for a in assets]
    rows.append({"asset": "Total", "json_bytes": sum(js.values()), "mesh_bytes": sum(ms.values())})
    df = pd.DataFrame(rows, columns=SIZE_COLUMNS[:3])
    df["ratio"] = (df["mesh_bytes"] / df["json_bytes"].where(df["json_bytes"] > 0)).round(3)
    logger.debug("size report over %d json / %d mesh file(s)", len(json_paths), len(mesh_paths))
    return df
