"""
2D geometry types.

Polygon2D is a shapely Polygon normalised to a CCW shell and CW holes; Polyline2D is a
shapely LineString (open) without repeated consecutive vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import LineString, MultiPolygon, Polygon
from shapely.geometry.polygon import orient


@dataclass(frozen=True)
class Circle2D:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"circle radius must be >= 0, got {self.radius}")


@dataclass(frozen=True)
class SplitPiece:
    polygon: Polygon
    theta: float                   # block direction vs +X
    center: tuple[float, float]    # piece centroid
    segment: int                   # block index along the centerline, 0 = start cap


def normalize(poly: Polygon) -> Polygon:
    """CCW shell, CW holes."""
    return orient(poly, sign=1.0)


def polygon_parts(geom) -> list[Polygon]:
    """Polygonal parts of any shapely geometry with positive area, normalised."""
    if geom is None or geom.is_empty:
        return []
    if isinstance(geom, Polygon):
        parts = [geom]
    elif isinstance(geom, MultiPolygon):
        parts = list(geom.geoms)
    elif hasattr(geom, "geoms"):
        parts = [p for g in geom.geoms for p in polygon_parts(g)]
    else:
        parts = []
    return [normalize(p) for p in parts if p.area > 0]


def clean(poly) -> list[Polygon]:
    if poly.is_valid:
        return polygon_parts(poly)
    return polygon_parts(shapely.make_valid(poly))


def dedupe_polyline(coords) -> np.ndarray:
    arr = np.asarray(coords, dtype=np.float64)[:, :2]
    if len(arr) < 2:
        return arr
    keep = np.ones(len(arr), dtype=bool)
    keep[1:] = np.any(np.diff(arr, axis=0) != 0, axis=1)
    return arr[keep]


def as_polyline(coords) -> LineString:
    arr = dedupe_polyline(coords)
    if len(arr) < 2:
        raise ValueError("a polyline needs at least 2 distinct vertices")
    return LineString(arr)


def segment_angles(coords: np.ndarray) -> np.ndarray:
    d = np.diff(coords, axis=0)
    return np.arctan2(d[:, 1], d[:, 0])
