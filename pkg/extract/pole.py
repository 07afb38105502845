from __future__ import annotations

import logging

import numpy as np
import shapely

from errors import DataError, EmptyPoleError, NoCenterlineError
from geom2d import (
    alphashape,
    extract_centerlines,
    fit_line_angle,
    min_enclosing_circle,
    ray_sample_polygon,
    rotate_plane,
    rotate_z,
    split_polygon_by_centerline,
)
from geostore.contract import Polygon3D, SurfacePair
from ingest.contract import LabeledCloud
from lift import Plane, lift_polygon_v2
from .contract import ExtractConfig

logger = logging.getLogger(__name__)


# =============================================================================
# Pole: stacked horizontal rings
# =============================================================================

def slab_index(z: np.ndarray, dh: float) -> tuple[np.ndarray, int]:
    """Slab of every z, bottom-aligned; a trailing partial slab joins the one below it."""
    z0 = float(z.min())
    count = max(1, int(np.floor((float(z.max()) - z0) / dh + 0.5)))
    idx = np.minimum(np.floor((z - z0) / dh).astype(np.int64), count - 1)
    return idx, count


def extract_pole(part: LabeledCloud, cfg: ExtractConfig) -> tuple[Polygon3D, ...]:
    """One n_rays-vertex ring per dh slab, bottom to top, at the slab's mean height."""
    pts = part.points
    if len(pts) < 3:
        raise EmptyPoleError(f"pole part has {len(pts)} point(s)")
    idx, count = slab_index(pts[:, 2], cfg.dh)
    rings = []
    for s in range(count):
        slab = pts[idx == s]
        if len(slab) < 3:
            continue
        circle = min_enclosing_circle(slab[:, :2])
        if circle.radius < 1e-9:
            continue
        ring = ray_sample_polygon(circle, cfg.n_rays)
        z = np.full(len(ring), float(slab[:, 2].mean()))
        rings.append(Polygon3D.from_arrays(np.column_stack([ring, z])))
    if not rings:
        raise EmptyPoleError(f"none of {count} pole slab(s) has enough points for a ring")
    logger.debug("pole: %d slab(s) -> %d ring(s)", count, len(rings))
    return tuple(rings)


# =============================================================================
# Panel: front/back face pair
# =============================================================================

def extract_panel(part: LabeledCloud, cfg: ExtractConfig) -> SurfacePair:
    pts = part.points
    theta = fit_line_angle(pts[:, :2])
    center = pts[:, :2].mean(axis=0)
    local = rotate_z(pts, -theta, center)
    face = alphashape(local[:, [0, 2]], cfg.alpha_panel, strict=False)[0]
    pair = lift_polygon_v2(face, local, Plane.XZ, cfg.lift)

    def back_to_world(r):
        return rotate_z(r, theta, center)

    return SurfacePair((pair.front.map(back_to_world),), (pair.back.map(back_to_world),))


# =============================================================================
# Light: rings along the arm
# =============================================================================

def extract_light(part: LabeledCloud, cfg: ExtractConfig) -> tuple[Polygon3D, ...]:
    """Rings perpendicular to the arm's XZ centerline, one per dl chunk, in centerline order."""
    pts = part.points
    theta = fit_line_angle(pts[:, :2])
    center = pts[:, :2].mean(axis=0)
    local = rotate_z(pts, -theta, center)
    xz = local[:, [0, 2]]

    try:
        outline = alphashape(xz, cfg.alpha_light_xz, strict=False)[0]
    except DataError as exc:
        raise NoCenterlineError(f"light XZ contour failed: {exc}") from None
    lines = extract_centerlines(
        outline, cfg.min_branch_light, densify=min(cfg.densify, cfg.dl / 2), mode="longest", smooth_iters=cfg.smooth_iters
    )
    if not lines:
        raise NoCenterlineError(f"light part has no XZ centerline of length >= {cfg.min_branch_light} m")

    taken = np.zeros(len(pts), dtype=bool)
    rings = []
    for piece in split_polygon_by_centerline(outline, lines[0], cfg.dl):
        mask = ~taken & shapely.intersects_xy(piece.polygon, xz[:, 0], xz[:, 1])
        taken |= mask
        chunk = local[mask]
        if len(chunk) < 3:
            continue
        pivot = (piece.center[0], 0.0, piece.center[1])
        flat = rotate_plane(chunk, -piece.theta, pivot, axes=(0, 2))
        try:
            section = alphashape(flat[:, 1:], cfg.alpha_light_yz, strict=False)[0]
        except DataError:
            logger.debug("light chunk %d: no YZ contour, skipped", piece.segment)
            continue
        yz = ray_sample_polygon(section, cfg.n_rays)
        ring = np.column_stack([np.full(len(yz), float(flat[:, 0].mean())), yz])
        ring = rotate_z(rotate_plane(ring, piece.theta, pivot, axes=(0, 2)), theta, center)
        rings.append(Polygon3D.from_arrays(ring))
    if not rings:
        raise EmptyPoleError("light part produced no section ring")
    return tuple(rings)
