from __future__ import annotations

import logging

import numpy as np
from shapely.geometry import Polygon
from shapely.ops import unary_union

from errors import DegenerateFitError, InvalidInstanceError
from geom2d import (
    SplitPiece,
    alphashape,
    extract_centerlines,
    fit_line_angle,
    grid_partition,
    intersect,
    split_polygon_by_centerline,
)
from geostore.contract import Polygon3D
from ingest.contract import LabeledCloud, PLANE_LIKE, Semantic
from lift import Plane, ReferenceIndex, lift_polygon_v1
from .contract import ExtractConfig

logger = logging.getLogger(__name__)


def _blocks(coarse: Polygon, cfg: ExtractConfig) -> list[SplitPiece]:
    lines = extract_centerlines(
        coarse, cfg.min_branch_plane, densify=cfg.densify, mode="longest", smooth_iters=cfg.smooth_iters
    )
    if lines:
        return split_polygon_by_centerline(coarse, lines[0], cfg.block_length)
    # no usable centerline: one block along the principal axis
    try:
        theta = fit_line_angle(np.asarray(coarse.exterior.coords)[:-1])
    except DegenerateFitError:
        theta = 0.0
    c = coarse.centroid
    logger.debug("no centerline for coarse polygon (area %.2f); single block at %.3f rad", coarse.area, theta)
    return [SplitPiece(coarse, theta, (c.x, c.y), 0)]


def plane_cells(xy: np.ndarray, cfg: ExtractConfig) -> list[Polygon]:
    """Fine contour cut by the grid of each centerline block; ordered block, along, across."""
    fine = unary_union(alphashape(xy, cfg.alpha_fine, strict=False))
    coarse_parts = alphashape(xy, cfg.alpha_coarse, strict=False)
    cells: list[Polygon] = []
    for coarse in coarse_parts:
        shell = Polygon(coarse.exterior)
        for piece in _blocks(shell, cfg):
            fine_piece = fine.intersection(piece.polygon)
            if fine_piece.is_empty:
                continue
            grid = grid_partition(piece.polygon, piece.theta, piece.center, cfg.grid_w, cfg.grid_l, clip=True)
            for cell in grid:
                cells.extend(p for p in intersect(fine_piece, cell) if p.area >= cfg.min_cell_area)
    return cells


def extract_plane_like(instance: LabeledCloud, cfg: ExtractConfig) -> tuple[Polygon3D, ...]:
    """
    RoadSurface / RoadSide: fine contour, gridded along the coarse contour's centerline.
    RoadLane: fine contour only (holes kept), no grid.
    Every 2D vertex is lifted with V1 against the instance points.
    """
    semantic = instance.semantic_label
    if semantic not in PLANE_LIKE:
        raise InvalidInstanceError(f"plane-like extraction got a {semantic.name} instance")
    pts = instance.points
    if semantic is Semantic.RoadLane:
        polys = alphashape(pts[:, :2], cfg.alpha_fine, strict=False)
    else:
        polys = plane_cells(pts[:, :2], cfg)
    index = ReferenceIndex(pts, Plane.XY)
    lifted = tuple(lift_polygon_v1(p, index, Plane.XY, cfg.lift) for p in polys)
    logger.debug("%s: %d points -> %d polygon(s)", semantic.name, len(pts), len(lifted))
    return lifted
