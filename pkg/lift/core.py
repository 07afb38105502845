"""
2D -> 3D lifting against reference points.

Both variants look up the reference points whose projection lies within `radius` of the
2D vertex (closed ball), falling back to the K nearest when that set is empty, and fill the
missing axis from their values: V1 takes the mean, V2 the means of the k largest and the k
smallest values (a front/back pair).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import Polygon

from errors import DegenerateInputError
from geostore.contract import Polygon3D
from .contract import LiftParams, Plane, PolygonPair


class ReferenceIndex:
    """KD-tree over the projected reference points; read-only once built."""

    def __init__(self, refs, plane: Plane | str):
        pts = np.asarray(refs, dtype=np.float64).reshape(-1, 3)
        if len(pts) == 0:
            raise DegenerateInputError("lift needs at least one reference point")
        self.plane = Plane(plane)
        self.refs = pts
        self.values = pts[:, self.plane.missing]
        self.tree = cKDTree(pts[:, list(self.plane.axes)])

    def neighbourhood(self, uv, params: LiftParams) -> np.ndarray:
        """Indices of the neighbourhood of one 2D point, ascending."""
        idx = self.tree.query_ball_point(uv, r=params.radius)
        if len(idx) == 0:
            k = min(params.k_nearest, len(self.refs))
            _, nn = self.tree.query(uv, k=k)
            idx = np.atleast_1d(nn)
        return np.sort(np.asarray(idx, dtype=np.int64))

    def _place(self, uv, w: float) -> np.ndarray:
        out = np.empty(3)
        i, j = self.plane.axes
        out[i], out[j] = uv[0], uv[1]
        out[self.plane.missing] = w
        return out

    def v1(self, uv, params: LiftParams) -> np.ndarray:
        vals = np.sort(self.values[self.neighbourhood(uv, params)])
        return self._place(uv, float(vals.mean()))

    def v2(self, uv, params: LiftParams) -> tuple[np.ndarray, np.ndarray]:
        idx = self.neighbourhood(uv, params)
        vals = self.values[idx]
        order = np.lexsort((idx, vals))         # by value, ties by input index
        n = len(order)
        k = params.pair_k if params.pair_k is not None else max(1, n // 5)
        k = max(1, min(k, n // 2))
        low = np.sort(vals[order[:k]]).mean()
        high = np.sort(vals[order[n - k:]]).mean()
        return self._place(uv, float(high)), self._place(uv, float(low))

    def lift_ring_v1(self, ring2d, params: LiftParams) -> np.ndarray:
        return np.array([self.v1(p, params) for p in np.asarray(ring2d)[:, :2]]).reshape(-1, 3)

    def lift_ring_v2(self, ring2d, params: LiftParams) -> tuple[np.ndarray, np.ndarray]:
        pairs = [self.v2(p, params) for p in np.asarray(ring2d)[:, :2]]
        hi = np.array([p[0] for p in pairs]).reshape(-1, 3)
        lo = np.array([p[1] for p in pairs]).reshape(-1, 3)
        return hi, lo


def _as_index(refs, plane) -> ReferenceIndex:
    return refs if isinstance(refs, ReferenceIndex) else ReferenceIndex(refs, plane)


def _open_rings(poly: Polygon) -> list[np.ndarray]:
    """Shell then holes, closing vertex dropped."""
    return [np.asarray(poly.exterior.coords)[:-1, :2]] + [np.asarray(h.coords)[:-1, :2] for h in poly.interiors]


# ==== public ====

def lift_v1(point2d, refs, plane: Plane | str, params: LiftParams) -> np.ndarray:
    return _as_index(refs, plane).v1(np.asarray(point2d, dtype=np.float64), params)


def lift_v2(point2d, refs, plane: Plane | str, params: LiftParams) -> tuple[np.ndarray, np.ndarray]:
    return _as_index(refs, plane).v2(np.asarray(point2d, dtype=np.float64), params)


def lift_polygon_v1(poly: Polygon, refs, plane: Plane | str, params: LiftParams) -> Polygon3D:
    index = _as_index(refs, plane)
    rings = [index.lift_ring_v1(r, params) for r in _open_rings(poly)]
    return Polygon3D.from_arrays(rings[0], rings[1:])


def lift_polygon_v2(poly: Polygon, refs, plane: Plane | str, params: LiftParams) -> PolygonPair:
    index = _as_index(refs, plane)
    lifted = [index.lift_ring_v2(r, params) for r in _open_rings(poly)]
    front = Polygon3D.from_arrays(lifted[0][0], [hi for hi, _ in lifted[1:]])
    back = Polygon3D.from_arrays(lifted[0][1], [lo for _, lo in lifted[1:]])
    return PolygonPair(front, back)
