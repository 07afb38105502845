"""
Guardrail extraction.

The instance is straightened block by block along its XY centerline, its side view (XZ)
contoured and lifted into a front/back pair, and the pair cut back into blocks and moved to
the original frame with the recorded block transforms.
"""

from __future__ import annotations

import logging

import numpy as np
import shapely
from shapely import affinity
from shapely.geometry import LineString, Polygon, box

from errors import DataError, EmptyContourError, InvalidInstanceError, NoCenterlineError
from geom2d import alphashape, extract_centerlines, split_polygon_by_centerline
from geom2d.contract import polygon_parts
from geostore.contract import Polygon3D, SurfacePair
from ingest.contract import LabeledCloud, Semantic
from lift import Plane, ReferenceIndex
from .contract import BlockTransform, ExtractConfig, GuardrailExtraction

logger = logging.getLogger(__name__)


# =============================================================================
# Straightening
# =============================================================================

def straighten(points: np.ndarray, contour: Polygon, centerline: LineString, spacing: float):
    """
    Rotate each centerline block to +X and lay the blocks end to end.

    Points go to the first block whose XY piece they touch; points outside the contour are
    dropped. Returns (straightened points, block transforms).
    """
    pieces = split_polygon_by_centerline(contour, centerline, spacing)
    x, y = points[:, 0], points[:, 1]
    taken = np.zeros(len(points), dtype=bool)
    moved, transforms = [], []
    arc = 0.0
    for piece in pieces:
        mask = ~taken & shapely.intersects_xy(piece.polygon, x, y)
        taken |= mask
        local = affinity.rotate(piece.polygon, -piece.theta, origin=piece.center, use_radians=True)
        minx, _, maxx, _ = local.bounds
        offset = (arc - minx, -local.centroid.y, 0.0)
        t = BlockTransform(piece.theta, piece.center, offset, arc, arc + (maxx - minx))
        transforms.append(t)
        if mask.any():
            moved.append(t.forward(points[mask]))
        arc = t.arc_end
    if not moved:
        raise EmptyContourError("no guardrail point falls inside its XY contour")
    return np.vstack(moved), transforms


# =============================================================================
# Pair cutting
# =============================================================================

class _EdgeLookup:
    """Lifted y along the edges of the XZ contour, for interpolating new vertices."""

    def __init__(self, rings_xz: list[np.ndarray], hi: list[np.ndarray], lo: list[np.ndarray]):
        a, b, ha, hb, la, lb = [], [], [], [], [], []
        for ring, h, l in zip(rings_xz, hi, lo):
            nxt = np.roll(np.arange(len(ring)), -1)
            a.append(ring)
            b.append(ring[nxt])
            ha.append(h)
            hb.append(h[nxt])
            la.append(l)
            lb.append(l[nxt])
        self.a, self.b = np.vstack(a), np.vstack(b)
        self.ha, self.hb = np.concatenate(ha), np.concatenate(hb)
        self.la, self.lb = np.concatenate(la), np.concatenate(lb)
        self.ab = self.b - self.a
        self.len2 = np.einsum("ij,ij->i", self.ab, self.ab)

    def __call__(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        hi, lo = np.empty(len(q)), np.empty(len(q))
        for i, p in enumerate(q):
            with np.errstate(invalid="ignore", divide="ignore"):
                t = np.einsum("ij,ij->i", p - self.a, self.ab) / self.len2
            t = np.clip(np.nan_to_num(t), 0.0, 1.0)
            foot = self.a + t[:, None] * self.ab
            e = int(np.argmin(np.einsum("ij,ij->i", foot - p, foot - p)))
            hi[i] = self.ha[e] + t[e] * (self.hb[e] - self.ha[e])
            lo[i] = self.la[e] + t[e] * (self.lb[e] - self.la[e])
        return hi, lo


def _open_rings(poly: Polygon) -> list[np.ndarray]:
    return [np.asarray(poly.exterior.coords)[:-1, :2]] + [np.asarray(r.coords)[:-1, :2] for r in poly.interiors]


def _to_3d(ring_xz: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.column_stack([ring_xz[:, 0], y, ring_xz[:, 1]])


def _cut_pairs(contour_xz: Polygon, index: ReferenceIndex, cfg: ExtractConfig, transforms):
    rings = _open_rings(contour_xz)
    lifted = [index.lift_ring_v2(r, cfg.lift) for r in rings]
    lookup = _EdgeLookup(rings, [hi[:, 1] for hi, _ in lifted], [lo[:, 1] for _, lo in lifted])

    _, zmin, _, zmax = contour_xz.bounds
    out = []                                    # (block, front Polygon3D, back Polygon3D)
    for b, t in enumerate(transforms):
        strip = box(t.arc_start, zmin - 1.0, t.arc_end, zmax + 1.0)
        for part in polygon_parts(contour_xz.intersection(strip)):
            part_rings = _open_rings(part)
            ys = [lookup(r) for r in part_rings]
            front = Polygon3D.from_arrays(_to_3d(part_rings[0], ys[0][0]), [_to_3d(r, y[0]) for r, y in zip(part_rings[1:], ys[1:])])
            back = Polygon3D.from_arrays(_to_3d(part_rings[0], ys[0][1]), [_to_3d(r, y[1]) for r, y in zip(part_rings[1:], ys[1:])])
            out.append((b, front, back))
    return out


# =============================================================================
# Public
# =============================================================================

def _extract_one(points, contour, centerline, cfg: ExtractConfig) -> GuardrailExtraction:
    straight, transforms = straighten(points, contour, centerline, cfg.guardrail_block)
    try:
        side = alphashape(straight[:, [0, 2]], cfg.alpha_guardrail_xz, strict=False)
    except DataError as exc:
        raise EmptyContourError(f"guardrail XZ contour failed: {exc}") from None
    if not side:
        raise EmptyContourError("guardrail XZ contour is empty")

    index = ReferenceIndex(straight, Plane.XZ)
    cut = [c for poly in side for c in _cut_pairs(poly, index, cfg, transforms)]
    cut.sort(key=lambda c: c[0])                # block order; stable within a block
    blocks = tuple(b for b, _, _ in cut)
    straight_pair = SurfacePair(tuple(f for _, f, _ in cut), tuple(k for _, _, k in cut))
    final = SurfacePair(
        tuple(f.map(transforms[b].inverse) for b, f, _ in cut),
        tuple(k.map(transforms[b].inverse) for b, _, k in cut),
    )
    return GuardrailExtraction(final, straight_pair, tuple(transforms), blocks)


def extract_guardrail(instance: LabeledCloud, cfg: ExtractConfig) -> list[GuardrailExtraction]:
    """One front/back pair (plus its transforms) per XY contour with a usable centerline."""
    if instance.semantic_label is not Semantic.Guardrail:
        raise InvalidInstanceError(f"guardrail extraction got a {instance.semantic_label.name} instance")
    pts = instance.points
    try:
        contours = alphashape(pts[:, :2], cfg.alpha_guardrail_xy, strict=False)
    except DataError as exc:
        raise NoCenterlineError(f"guardrail XY contour failed: {exc}") from None

    results = []
    for contour in contours:
        lines = extract_centerlines(
            contour, cfg.min_branch_guardrail, densify=cfg.densify, mode="longest", smooth_iters=cfg.smooth_iters
        )
        if not lines:
            logger.debug("guardrail contour of area %.3f has no centerline", contour.area)
            continue
        results.append(_extract_one(pts, contour, lines[0], cfg))
    if not results:
        raise NoCenterlineError(f"no guardrail centerline of length >= {cfg.min_branch_guardrail} m")
    return results
