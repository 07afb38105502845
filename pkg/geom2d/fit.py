from __future__ import annotations

import math

import numpy as np

from errors import DegenerateFitError


def fit_line_angle(points) -> float:
    """Total-least-squares direction of the XY points, in (-pi/2, pi/2]."""
    pts = np.asarray(points, dtype=np.float64)[:, :2]
    if len(pts) < 2:
        raise DegenerateFitError(f"line fit needs >= 2 points, got {len(pts)}")
    centered = pts - pts.mean(axis=0)
    if not np.any(centered):
        raise DegenerateFitError("line fit on coincident points")
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if len(s) > 1 and s[0] - s[1] <= 1e-12 * s[0]:
        raise DegenerateFitError("line fit has no dominant direction")
    theta = math.atan2(vt[0, 1], vt[0, 0])
    if theta <= -math.pi / 2:
        theta += math.pi
    elif theta > math.pi / 2:
        theta -= math.pi
    return theta


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def rotate_z(points, angle: float, center_xy) -> np.ndarray:
    """Rotate (n, 2|3) points counter-clockwise by `angle` about a vertical axis through center_xy."""
    pts = np.array(points, dtype=np.float64, copy=True)
    c = np.asarray(center_xy, dtype=np.float64)[:2]
    pts[:, :2] = (pts[:, :2] - c) @ _rotation(angle).T + c
    return pts


def rotate_plane(points, angle: float, center, axes: tuple[int, int] = (0, 2)) -> np.ndarray:
    """Rotate within the plane spanned by `axes` (default XZ) about `center`."""
    pts = np.array(points, dtype=np.float64, copy=True)
    i, j = axes
    c = np.asarray(center, dtype=np.float64)
    ci, cj = (c[i], c[j]) if len(c) > max(i, j) else (c[0], c[1])
    sub = np.column_stack([pts[:, i] - ci, pts[:, j] - cj]) @ _rotation(angle).T
    pts[:, i] = sub[:, 0] + ci
    pts[:, j] = sub[:, 1] + cj
    return pts
