"""
Ear clipping with hole bridging.

Holes are merged into the outer ring one at a time (rightmost hole first) through a bridge
from the hole's rightmost vertex to the nearest outer vertex it can see. The merged ring is
then clipped ear by ear, resuming at the vertex before the last ear.
"""

from __future__ import annotations

import numpy as np
import shapely
from shapely.geometry import LineString, Polygon

from errors import TriangulationError

_EPS = 1e-12


def signed_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


# =============================================================================
# Hole bridging
# =============================================================================

def _segments_cross(p1, p2, q1, q2) -> bool:
    """Proper crossing only; touching at endpoints does not count."""
    d1, d2 = _cross(q1, q2, p1), _cross(q1, q2, p2)
    d3, d4 = _cross(p1, p2, q1), _cross(p1, p2, q2)
    return ((d1 > _EPS and d2 < -_EPS) or (d1 < -_EPS and d2 > _EPS)) and (
        (d3 > _EPS and d4 < -_EPS) or (d3 < -_EPS and d4 > _EPS)
    )


def _bridge(xy: np.ndarray, outer: list[int], hole: list[int], region, bridges) -> list[int]:
    m = max(range(len(hole)), key=lambda k: (xy[hole[k], 0], -xy[hole[k], 1]))
    mp = xy[hole[m]]
    d = np.hypot(*(xy[outer] - mp).T)
    for pos in np.argsort(d, kind="stable"):
        pp = xy[outer[pos]]
        seg = LineString([mp, pp]) if d[pos] > 0 else None
        if seg is not None and not region.covers(seg):
            continue
        if any(_segments_cross(mp, pp, a, b) for a, b in bridges):
            continue
        bridges.append((mp, pp))
        ring = hole[m:] + hole[: m + 1]
        return outer[: pos + 1] + ring + outer[pos:]
    raise TriangulationError("no visible outer vertex to bridge a hole to")


def _merge_holes(xy: np.ndarray, shell: list[int], holes: list[list[int]], region) -> list[int]:
    outer = list(shell)
    bridges: list = []
    for hole in sorted(holes, key=lambda h: -float(xy[h, 0].max())):
        outer = _bridge(xy, outer, hole, region, bridges)
    return outer


# =============================================================================
# Ear clipping
# =============================================================================

def _side(o, a, p: np.ndarray) -> np.ndarray:
    return (a[0] - o[0]) * (p[:, 1] - o[1]) - (a[1] - o[1]) * (p[:, 0] - o[0])


def _is_ear(xy, ring: list[int], i: int, strict: bool) -> bool:
    """Convex corner with no other ring vertex inside (inclusive unless `strict`)."""
    n = len(ring)
    corners_at = [(i - 1) % n, i, (i + 1) % n]
    a, b, c = (xy[ring[k]] for k in corners_at)
    if _cross(a, b, c) <= _EPS:                 # reflex or collinear
        return False
    p = xy[np.delete(np.asarray(ring), corners_at)]
    coincident = np.all(p == a, axis=1) | np.all(p == b, axis=1) | np.all(p == c, axis=1)
    p = p[~coincident]
    if len(p) == 0:
        return True
    s1, s2, s3 = _side(a, b, p), _side(b, c, p), _side(c, a, p)
    if strict:
        inside = (s1 > _EPS) & (s2 > _EPS) & (s3 > _EPS)
    else:
        inside = (s1 >= -_EPS) & (s2 >= -_EPS) & (s3 >= -_EPS)
    return not inside.any()


def _clip(xy: np.ndarray, ring: list[int]) -> list[tuple[int, int, int]]:
    ring = list(ring)
    tris: list[tuple[int, int, int]] = []
    i, stalled, strict = 0, 0, False
    while len(ring) > 3:
        n = len(ring)
        i %= n
        if _is_ear(xy, ring, i, strict):
            tris.append((ring[(i - 1) % n], ring[i], ring[(i + 1) % n]))
            del ring[i]
            i = (i - 1) % len(ring)
            stalled, strict = 0, False
            continue
        i += 1
        stalled += 1
        if stalled > n:
            if not strict:
                strict, stalled = True, 0
                continue
            if abs(signed_area(xy[ring])) <= _EPS:
                return tris                     # only a collinear sliver left
            raise TriangulationError(f"ear clipping stuck with {n} vertices left (self-intersecting ring?)")
    if len(ring) == 3 and _cross(*(xy[k] for k in ring)) > _EPS:
        tris.append(tuple(ring))
    return tris


# =============================================================================
# Public
# =============================================================================

def triangulate_2d(shell: np.ndarray, holes=()) -> np.ndarray:
    """
    Triangles (k, 3) indexing into the concatenation [shell, *holes].

    Triangles come out counter-clockwise when the shell is counter-clockwise; a clockwise shell
    gives clockwise triangles (the input winding is followed, not corrected).
    """
    rings = [np.asarray(shell, dtype=np.float64)[:, :2]] + [np.asarray(h, dtype=np.float64)[:, :2] for h in holes]
    if signed_area(rings[0]) < 0:               # mirror to CCW; mirrored CCW triangles are CW again here
        rings = [r * [1.0, -1.0] for r in rings]
    xy = np.vstack(rings)
    starts = np.cumsum([0] + [len(r) for r in rings])
    shell_idx = list(range(starts[0], starts[1]))
    hole_idx = []
    for k in range(1, len(rings)):
        idx = list(range(starts[k], starts[k + 1]))
        if signed_area(rings[k]) > 0:           # holes go clockwise
            idx.reverse()
        hole_idx.append(idx)

    if hole_idx:
        region = Polygon(rings[0], [r for r in rings[1:]])
        shapely.prepare(region)
        ring = _merge_holes(xy, shell_idx, hole_idx, region)
    else:
        ring = shell_idx
    return np.asarray(_clip(xy, ring), dtype=np.int64).reshape(-1, 3)


def newell_normal(ring: np.ndarray) -> np.ndarray:
    r = np.asarray(ring, dtype=np.float64)
    nxt = np.roll(r, -1, axis=0)
    n = np.array([
        np.sum((r[:, 1] - nxt[:, 1]) * (r[:, 2] + nxt[:, 2])),
        np.sum((r[:, 2] - nxt[:, 2]) * (r[:, 0] + nxt[:, 0])),
        np.sum((r[:, 0] - nxt[:, 0]) * (r[:, 1] + nxt[:, 1])),
    ])
    norm = np.linalg.norm(n)
    if norm <= _EPS:
        raise TriangulationError("polygon has no area (degenerate Newell normal)")
    return n / norm


def triangulate_3d(rings: list[np.ndarray]) -> np.ndarray:
    """Triangulate a planar-ish 3D polygon in the plane of its shell; faces follow the shell winding."""
    n = newell_normal(rings[0])
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(n, helper)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    flat = [np.column_stack([r @ u, r @ v]) for r in rings]
    return triangulate_2d(flat[0], flat[1:])
