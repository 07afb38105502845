from __future__ import annotations

import math

import numpy as np
import shapely
from scipy.spatial import ConvexHull, QhullError
from shapely.geometry import LineString, Polygon

from errors import DegenerateInputError
from .contract import Circle2D

_MULTIPLICATIVE_EPSILON = 1 + 1e-14


# =============================================================================
# Smallest enclosing circle (randomised incremental, expected linear time)
# =============================================================================

def _in_circle(c, p) -> bool:
    return c is not None and math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * _MULTIPLICATIVE_EPSILON


def _diameter(a, b):
    cx, cy = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    return cx, cy, max(math.hypot(cx - a[0], cy - a[1]), math.hypot(cx - b[0], cy - b[1]))


def _circumcircle(a, b, c):
    # computed relative to the bbox centre for precision
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    r = max(math.hypot(x - a[0], y - a[1]), math.hypot(x - b[0], y - b[1]), math.hypot(x - c[0], y - c[1]))
    return x, y, r


def _cross(x0, y0, x1, y1, x2, y2) -> float:
    return (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)


def _two_points(points, p, q):
    circ = _diameter(p, q)
    left = right = None
    px, py = p
    qx, qy = q
    for r in points:
        if _in_circle(circ, r):
            continue
        cross = _cross(px, py, qx, qy, r[0], r[1])
        c = _circumcircle(p, q, r)
        if c is None:
            continue
        side = _cross(px, py, qx, qy, c[0], c[1])
        if cross > 0.0 and (left is None or side > _cross(px, py, qx, qy, left[0], left[1])):
            left = c
        elif cross < 0.0 and (right is None or side < _cross(px, py, qx, qy, right[0], right[1])):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _one_point(points, p):
    c = (p[0], p[1], 0.0)
    for i, q in enumerate(points):
        if not _in_circle(c, q):
            c = _diameter(p, q) if c[2] == 0.0 else _two_points(points[: i + 1], p, q)
    return c


def min_enclosing_circle(points) -> Circle2D:
    """Smallest circle containing all points (XY only)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or len(pts) == 0:
        raise DegenerateInputError("enclosing circle of an empty point set")
    pts = np.unique(pts[:, :2], axis=0)
    if len(pts) >= 3:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            pass                    # collinear: keep all
    order = np.random.default_rng(0).permutation(len(pts))
    shuffled = [tuple(p) for p in pts[order].tolist()]
    c = None
    for i, p in enumerate(shuffled):
        if c is None or not _in_circle(c, p):
            c = _one_point(shuffled[: i + 1], p)
    return Circle2D((c[0], c[1]), c[2])


# =============================================================================
# Ray sampling
# =============================================================================

def ray_sample_polygon(shape, n_rays: int, origin=None) -> np.ndarray:
    """
    (n_rays, 2) boundary points hit by rays at 2*pi*i/n_rays from the shape's centre.

    Circles are sampled analytically. For polygons the origin defaults to the centre of the
    smallest enclosing circle (representative point if that falls outside) and each ray keeps
    its farthest boundary hit.
    """
    if n_rays < 3:
        raise ValueError(f"n_rays must be >= 3, got {n_rays}")
    angles = 2.0 * np.pi * np.arange(n_rays) / n_rays
    directions = np.column_stack([np.cos(angles), np.sin(angles)])

    if isinstance(shape, Circle2D):
        center = np.asarray(shape.center if origin is None else origin, dtype=np.float64)
        return center + shape.radius * directions

    if not isinstance(shape, Polygon) or shape.is_empty:
        raise DegenerateInputError("ray sampling needs a Circle2D or a non-empty Polygon")
    if origin is None:
        c = min_enclosing_circle(np.asarray(shape.exterior.coords))
        center = np.asarray(c.center)
        if not shape.covers(shapely.points(center)):
            rp = shape.representative_point()
            center = np.array([rp.x, rp.y])
    else:
        center = np.asarray(origin, dtype=np.float64)

    minx, miny, maxx, maxy = shape.bounds
    reach = 2.0 * math.hypot(maxx - minx, maxy - miny) + 1.0
    boundary = shape.boundary
    out = np.empty((n_rays, 2))
    for i, d in enumerate(directions):
        hits = shapely.get_coordinates(boundary.intersection(LineString([center, center + reach * d])))
        if len(hits) == 0:
            out[i] = center
            continue
        out[i] = hits[int(np.argmax(np.hypot(*(hits - center).T)))]
    return out
