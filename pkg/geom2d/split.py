from __future__ import annotations

import logging
import math

import numpy as np
import shapely
from shapely import affinity
from shapely.geometry import LineString, Polygon, box
from shapely.ops import polygonize, unary_union

from errors import DegenerateInputError, InvalidCenterlineError
from .centerline import resample_polyline
from .contract import SplitPiece, dedupe_polyline, polygon_parts, segment_angles

logger = logging.getLogger(__name__)

_CUT_EXTEND = 1e-6


# =============================================================================
# Centerline split
# =============================================================================

def _cutter(polygon: Polygon, through: np.ndarray, direction: np.ndarray, reach: float) -> LineString | None:
    """The chord of `polygon` through `through`, perpendicular to `direction`."""
    normal = np.array([-direction[1], direction[0]])
    long_cut = LineString([through - reach * normal, through + reach * normal])
    pieces = polygon.intersection(long_cut)
    lines = [g for g in getattr(pieces, "geoms", [pieces]) if isinstance(g, LineString) and not g.is_empty]
    if not lines:
        return None
    here = shapely.points(through)
    nearest = min(lines, key=lambda g: g.distance(here))
    coords = np.asarray(nearest.coords)
    a, b = coords[0], coords[-1]
    ab = b - a
    n = float(np.hypot(*ab))
    if n == 0:
        return None
    ab /= n
    return LineString([a - _CUT_EXTEND * ab, b + _CUT_EXTEND * ab])


def _block_angles(coords: np.ndarray, mids: np.ndarray) -> np.ndarray:
    """End blocks take their own segment's angle; inner blocks the chord between two cut points."""
    theta = segment_angles(coords)
    inner = np.diff(mids, axis=0)
    return np.concatenate([theta[:1], np.arctan2(inner[:, 1], inner[:, 0]), theta[-1:]])


def split_polygon_by_centerline(polygon: Polygon, centerline: LineString, spacing: float) -> list[SplitPiece]:
    """
    Cut `polygon` into blocks along `centerline` resampled every `spacing` meters.

    Each resampled segment contributes one cut: its perpendicular bisector, extended to the
    polygon boundary. n segments give n cuts and n + 1 blocks; the two end blocks carry the
    angle of the segment they touch, inner blocks the direction between their two cuts. A
    centerline that resamples to a single segment leaves the polygon whole. Pieces come back
    ordered by block.
    """
    if spacing <= 0:
        raise ValueError(f"spacing must be > 0, got {spacing}")
    if not polygon.buffer(1e-6).covers(centerline):
        raise InvalidCenterlineError("centerline leaves the polygon it should split")

    line = resample_polyline(centerline, spacing)
    coords = dedupe_polyline(line.coords)
    theta = segment_angles(coords)
    if len(coords) < 3:
        c = polygon.centroid
        return [SplitPiece(part, float(theta[0]), (c.x, c.y), 0) for part in polygon_parts(polygon)]

    d = np.diff(coords, axis=0)
    lengths = np.hypot(d[:, 0], d[:, 1])
    d /= lengths[:, None]
    mids = 0.5 * (coords[:-1] + coords[1:])
    mid_arc = np.concatenate([[0.0], np.cumsum(lengths)[:-1]]) + 0.5 * lengths

    minx, miny, maxx, maxy = polygon.bounds
    reach = 2.0 * math.hypot(maxx - minx, maxy - miny) + 1.0
    cutters = [c for c in (_cutter(polygon, m, dk, reach) for m, dk in zip(mids, d)) if c is not None]
    noded = unary_union([polygon.boundary, *cutters])
    faces = [f for f in polygonize(noded) if f.area > 0 and polygon.contains(f.representative_point())]

    angles = _block_angles(coords, mids)
    path = LineString(coords)
    pieces = []
    for face in faces:
        block = int(np.searchsorted(mid_arc, path.project(face.representative_point()), side="right"))
        c = face.centroid
        pieces.append(SplitPiece(polygon_parts(face)[0], float(angles[block]), (c.x, c.y), block))
    pieces.sort(key=lambda p: (p.segment, p.center))
    logger.debug("split: %d cut(s) -> %d piece(s)", len(cutters), len(pieces))
    return pieces


# =============================================================================
# Grid partition
# =============================================================================

def grid_partition(
    sub_polygon: Polygon,
    theta: float,
    center,
    grid_w: float,
    grid_l: float,
    *,
    clip: bool = False,
) -> list[Polygon]:
    """
    Tile `sub_polygon` with grid_l (along theta) x grid_w (across) rectangles.

    The polygon is rotated by -theta about `center`, tiled from its bounding-box minimum
    and the cells that overlap it are rotated back. With `clip`, cells are cut to the
    polygon. Order: along-axis index outer, across-axis inner.
    """
    if grid_w <= 0 or grid_l <= 0:
        raise ValueError(f"grid size must be > 0, got {grid_w} x {grid_l}")
    if sub_polygon.is_empty or sub_polygon.area <= 1e-12:
        raise DegenerateInputError("grid partition of an empty polygon")

    origin = (float(center[0]), float(center[1]))
    local = affinity.rotate(sub_polygon, -theta, origin=origin, use_radians=True)
    minx, miny, maxx, maxy = local.bounds
    nx = max(1, math.ceil((maxx - minx) / grid_l - 1e-9))
    ny = max(1, math.ceil((maxy - miny) / grid_w - 1e-9))
    tol = 1e-12 * max(1.0, local.area)
    shapely.prepare(local)

    cells = []
    for i in range(nx):
        for j in range(ny):
            cell = box(minx + i * grid_l, miny + j * grid_w, minx + (i + 1) * grid_l, miny + (j + 1) * grid_w)
            if not local.intersects(cell):
                continue
            inter = local.intersection(cell)
            if inter.area <= tol:
                continue
            if clip:
                cells.extend(polygon_parts(inter))
            else:
                cells.append(cell)
    return [affinity.rotate(c, theta, origin=origin, use_radians=True) for c in cells]


def intersect(a, b) -> list[Polygon]:
    return polygon_parts(a.intersection(b))
