"""
Exact DBSCAN on a uniform grid + kd-tree.

Cells have a diagonal just under eps, so a cell holding >= min_pts points makes all of
them core without any distance query; only the remaining points are counted through
the kd-tree. Core points are linked cell-to-cell with a union-find, and border points
join the cluster of their nearest core point (ties -> lowest cluster id).
"""

from __future__ import annotations

import itertools
import logging

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from errors import DegenerateInputError
from .contract import ClusterParams, Clustering, NOISE

logger = logging.getLogger(__name__)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _neighbour_offsets(dim: int, side: float, eps: float) -> list[tuple[int, ...]]:
    reach = int(np.ceil(eps / side))
    zero = (0,) * dim
    offsets = []
    for off in itertools.product(range(-reach, reach + 1), repeat=dim):
        gap = np.maximum(np.abs(off) - 1, 0) * side
        # half of the symmetric stencil is enough for undirected links
        if off > zero and float((gap ** 2).sum()) <= eps * eps:
            offsets.append(off)
    return offsets


def dbscan(points, params: ClusterParams) -> Clustering:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or len(pts) == 0:
        raise DegenerateInputError("dbscan needs a non-empty (n, d) point array")
    n, dim = pts.shape
    eps, min_pts = float(params.eps), int(params.min_pts)

    side = eps / np.sqrt(dim) * (1.0 - 1e-9)
    keys = np.floor((pts - pts.min(axis=0)) / side).astype(np.int64)
    cells, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(inverse, kind="stable")
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))

    # ---- core points ----
    core = counts[inverse] >= min_pts
    sparse = np.flatnonzero(~core)
    if len(sparse):
        lengths = cKDTree(pts).query_ball_point(pts[sparse], r=eps, return_length=True)
        core[sparse] = np.asarray(lengths) >= min_pts

    labels = np.full(n, NOISE, dtype=np.int64)
    if not core.any():
        return Clustering(labels, 0, core)

    # ---- link core cells ----
    cell_core: dict[int, np.ndarray] = {}
    for c in np.unique(inverse[core]).tolist():
        members = order[starts[c]:starts[c] + counts[c]]
        cell_core[c] = members[core[members]]
    cell_keys = [tuple(k) for k in cells.tolist()]
    lookup = {cell_keys[c]: c for c in cell_core}
    offsets = _neighbour_offsets(dim, side, eps)

    uf = _UnionFind(len(cells))
    for c in cell_core:
        key = cell_keys[c]
        for off in offsets:
            nb = lookup.get(tuple(a + b for a, b in zip(key, off)))
            if nb is None or uf.find(c) == uf.find(nb):
                continue
            if cdist(pts[cell_core[c]], pts[cell_core[nb]]).min() <= eps:
                uf.union(c, nb)

    components: dict[int, list[int]] = {}
    for c in cell_core:
        components.setdefault(uf.find(c), []).append(c)
    ranked = sorted(components.values(), key=lambda cs: min(int(cell_core[c].min()) for c in cs))
    for cid, cs in enumerate(ranked):
        for c in cs:
            labels[cell_core[c]] = cid

    # ---- border points ----
    core_idx = np.flatnonzero(core)
    rest = np.flatnonzero(~core)
    if len(rest):
        neighbours = cKDTree(pts[core_idx]).query_ball_point(pts[rest], r=eps)
        for i, nb in zip(rest.tolist(), neighbours):
            if not nb:
                continue
            nb = core_idx[np.asarray(nb)]
            dist = np.sqrt(((pts[nb] - pts[i]) ** 2).sum(axis=1))
            within = dist <= eps
            if not within.any():
                continue
            nb, dist = nb[within], dist[within]
            labels[i] = labels[nb][dist == dist.min()].min()

    logger.debug(
        "dbscan eps=%.3f min_pts=%d: %d points, %d clusters, %d noise",
        eps, min_pts, n, len(ranked), int((labels == NOISE).sum()),
    )
    return Clustering(labels, len(ranked), core)
