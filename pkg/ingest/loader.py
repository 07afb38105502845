"""
ingest.loader
=============

Read and write labeled point clouds.

CSV: header `x,y,z,semantic[,part]`, semantic codes 0..5, part codes 0..2 or empty.
PLY: vertex properties x, y, z (float64), semantic (uint8), optional part (uint8, 255 = none).
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from plyfile import PlyData, PlyElement, PlyParseError

from errors import MissingFileError, ParseError, DataError
from .contract import LabeledCloud, NO_PART, Part, Semantic

logger = logging.getLogger(__name__)

_CSV_COLUMNS = ["x", "y", "z", "semantic"]


def _infer_format(path: Path, fmt: str | None) -> str:
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    if fmt not in ("csv", "ply"):
        raise ParseError(f"{path}: unsupported point cloud format {fmt!r} (expected csv or ply)")
    return fmt


def load_cloud(path: str | Path, fmt: str | None = None) -> LabeledCloud:
    path = Path(path)
    if not path.exists():
        raise MissingFileError(f"point cloud not found: {path}")
    fmt = _infer_format(path, fmt)
    cloud = _read_csv(path) if fmt == "csv" else _read_ply(path)
    if len(cloud) == 0:
        raise ParseError(f"{path}: no points")
    logger.info("Loaded %d points from %s", len(cloud), path)
    return cloud


def save_cloud(cloud: LabeledCloud, path: str | Path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = _infer_format(path, fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        _write_csv(cloud, path)
    else:
        _write_ply(cloud, path)
    return path


# =============================================================================
# CSV
# =============================================================================

def _codes(series: pd.Series, name: str, path: Path, valid: type) -> np.ndarray:
    try:
        values = pd.to_numeric(series, errors="raise").to_numpy(dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{path}: non-numeric {name} value ({exc})") from None
    if not np.all(values == np.round(values)):
        raise ParseError(f"{path}: {name} codes must be integers")
    bad = ~np.isin(values, [int(v) for v in valid])
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise ParseError(f"{path}: unknown {name} code {values[row]:g} at row {row + 1}")
    return values.astype(np.uint8)


def _read_csv(path: Path) -> LabeledCloud:
    try:
        df = pd.read_csv(path, float_precision="round_trip", skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: malformed CSV ({exc})") from None
    cols = [c.strip() for c in df.columns]
    if cols[:4] != _CSV_COLUMNS or len(cols) > 5 or (len(cols) == 5 and cols[4] != "part"):
        raise ParseError(f"{path}: header must be x,y,z,semantic[,part], got {','.join(cols)}")
    df.columns = cols
    if df[["x", "y", "z", "semantic"]].isna().any().any():
        raise ParseError(f"{path}: missing value in x,y,z,semantic")
    try:
        points = df[["x", "y", "z"]].apply(pd.to_numeric, errors="raise").to_numpy(dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{path}: non-numeric coordinate ({exc})") from None
    if not np.isfinite(points).all():
        raise ParseError(f"{path}: non-finite coordinate")
    semantic = _codes(df["semantic"], "semantic", path, Semantic)

    part = np.full(len(df), NO_PART, dtype=np.uint8)
    if "part" in df.columns:
        present = df["part"].notna().to_numpy()
        if present.any():
            part[present] = _codes(df.loc[present, "part"], "part", path, Part)
    try:
        return LabeledCloud(points, semantic, part)
    except DataError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _write_csv(cloud: LabeledCloud, path: Path) -> None:
    df = pd.DataFrame(cloud.points, columns=["x", "y", "z"])
    df["semantic"] = cloud.semantic.astype(np.int64)
    if (cloud.part != NO_PART).any():
        df["part"] = pd.array(
            np.where(cloud.part == NO_PART, pd.NA, cloud.part.astype(object)), dtype="Int64"
        )
    df.to_csv(path, index=False)


# =============================================================================
# PLY
# =============================================================================

def _read_ply(path: Path) -> LabeledCloud:
    try:
        ply = PlyData.read(str(path))
        vertex = ply["vertex"]
        names = vertex.data.dtype.names
        points = np.column_stack([np.asarray(vertex[k], dtype=np.float64) for k in ("x", "y", "z")])
        semantic = np.asarray(vertex["semantic"])
        part = np.asarray(vertex["part"]) if "part" in names else None
    except (PlyParseError, KeyError, ValueError) as exc:
        raise ParseError(f"{path}: malformed PLY ({exc})") from None
    unknown = ~np.isin(semantic, [int(s) for s in Semantic])
    if unknown.any():
        raise ParseError(f"{path}: unknown semantic code {int(semantic[unknown][0])}")
    if part is not None:
        labeled = part != NO_PART
        if labeled.any() and not np.isin(part[labeled], [int(p) for p in Part]).all():
            raise ParseError(f"{path}: unknown part code")
    try:
        return LabeledCloud.from_arrays(points, semantic, part)
    except DataError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _write_ply(cloud: LabeledCloud, path: Path) -> None:
    arr = np.empty(
        len(cloud),
        dtype=[("x", "<f8"), ("y", "<f8"), ("z", "<f8"), ("semantic", "u1"), ("part", "u1")],
    )
    arr["x"], arr["y"], arr["z"] = cloud.points.T
    arr["semantic"] = cloud.semantic
    arr["part"] = cloud.part
    PlyData([PlyElement.describe(arr, "vertex")], text=False, byte_order="<").write(str(path))
