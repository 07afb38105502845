"""
Voronoi centerlines.

The polygon boundary is densified and used as Voronoi seeds; Voronoi edges that lie inside
the polygon approximate its medial axis. Spurs (leaf chains ending at a junction) are
pruned when shorter than `min_branch_len`, or shorter than `spur_ratio` times the junction's
distance to the boundary (the diagonal branches running into convex corners).
"""

from __future__ import annotations

import logging
from collections import defaultdict

import numpy as np
import shapely
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import QhullError, Voronoi
from shapely.geometry import LineString

from .contract import as_polyline, dedupe_polyline, polygon_parts

logger = logging.getLogger(__name__)

CENTERLINE_MODES = ("prune", "longest")


# =============================================================================
# Polyline helpers
# =============================================================================

def resample_polyline(line: LineString, spacing: float) -> LineString:
    """Equal arc-length resampling; endpoints kept, last gap may be shorter."""
    if spacing <= 0:
        raise ValueError(f"spacing must be > 0, got {spacing}")
    coords = dedupe_polyline(line.coords)
    if len(coords) < 2:
        raise ValueError("resampling needs an open polyline with >= 2 distinct vertices")
    seg = np.hypot(*np.diff(coords, axis=0).T)
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    total = float(cum[-1])
    if spacing >= total:
        return LineString([coords[0], coords[-1]])
    targets = np.arange(int(np.floor(total / spacing)) + 1) * spacing
    if total - targets[-1] <= 1e-9 * max(1.0, total):
        targets = targets[:-1]
    x = np.interp(targets, cum, coords[:, 0])
    y = np.interp(targets, cum, coords[:, 1])
    out = np.column_stack([x, y])
    out[0] = coords[0]
    return LineString(np.vstack([out, coords[-1:]]))


def chaikin(coords: np.ndarray, iterations: int, closed: bool = False) -> np.ndarray:
    """Chaikin corner cutting; open polylines keep their endpoints."""
    p = np.asarray(coords, dtype=np.float64)
    for _ in range(iterations):
        if closed:
            nxt = np.roll(p, -1, axis=0)
            out = np.empty((2 * len(p), 2))
            out[0::2] = 0.75 * p + 0.25 * nxt
            out[1::2] = 0.25 * p + 0.75 * nxt
            p = out
        else:
            if len(p) < 3:
                break
            out = np.empty((2 * (len(p) - 1), 2))
            out[0::2] = 0.75 * p[:-1] + 0.25 * p[1:]
            out[1::2] = 0.25 * p[:-1] + 0.75 * p[1:]
            p = np.vstack([p[:1], out, p[-1:]])
    return p


# =============================================================================
# Medial graph
# =============================================================================

def _medial_graph(poly, densify: float):
    dense = shapely.segmentize(poly, densify)
    rings = [dense.exterior, *dense.interiors]
    seeds = np.unique(np.vstack([np.asarray(r.coords)[:-1, :2] for r in rings]), axis=0)
    if len(seeds) < 4:
        return None
    try:
        vor = Voronoi(seeds)
    except QhullError:
        return None
    ridges = np.array([r for r in vor.ridge_vertices if -1 not in r], dtype=np.int64).reshape(-1, 2)
    if len(ridges) == 0:
        return None
    verts = vor.vertices
    inside = shapely.contains_xy(poly, verts[:, 0], verts[:, 1])
    ridges = ridges[inside[ridges[:, 0]] & inside[ridges[:, 1]]]
    if len(ridges) == 0:
        return None
    shapely.prepare(poly)
    ridges = ridges[shapely.contains(poly, shapely.linestrings(verts[ridges]))]
    if len(ridges) == 0:
        return None

    # merge vertices Qhull emits several times for co-circular seeds
    scale = max(1.0, float(np.abs(seeds).max()))
    snapped = np.round(verts / (1e-9 * scale)).astype(np.int64)
    _, node_of = np.unique(snapped, axis=0, return_inverse=True)
    node_of = node_of.reshape(-1)
    xy = np.zeros((int(node_of.max()) + 1, 2))
    xy[node_of] = verts

    u, v = node_of[ridges[:, 0]], node_of[ridges[:, 1]]
    distinct = u != v
    pairs = np.unique(np.sort(np.column_stack([u[distinct], v[distinct]]), axis=1), axis=0)
    adj: dict[int, dict[int, float]] = defaultdict(dict)
    for a, b in pairs.tolist():
        w = float(np.hypot(*(xy[a] - xy[b])))
        adj[a][b] = w
        adj[b][a] = w
    radius = shapely.distance(shapely.points(xy), poly.boundary)
    return dict(adj), xy, radius


def _walk(adj, start: int, first: int) -> tuple[list[int], float]:
    """Follow degree-2 nodes from `start` through `first`; returns node list and length."""
    nodes = [start, first]
    length = adj[start][first]
    prev, cur = start, first
    while len(adj[cur]) == 2 and cur != start:
        nxt = next(n for n in adj[cur] if n != prev)
        length += adj[cur][nxt]
        nodes.append(nxt)
        prev, cur = cur, nxt
    return nodes, length


def _remove_chain(adj, nodes: list[int]) -> None:
    for a, b in zip(nodes[:-1], nodes[1:]):
        adj[a].pop(b, None)
        adj[b].pop(a, None)
    for n in nodes:
        if n in adj and not adj[n]:
            del adj[n]


def _prune(adj, radius, min_len: float, spur_ratio: float) -> None:
    while True:
        spurs = defaultdict(list)
        for leaf in sorted(n for n, nb in adj.items() if len(nb) == 1):
            nodes, length = _walk(adj, leaf, next(iter(adj[leaf])))
            end = nodes[-1]
            if len(adj[end]) < 3:
                continue
            if length < max(min_len, spur_ratio * float(radius[end])):
                spurs[end].append((length, leaf, nodes))
        if not spurs:
            return
        for junction, items in spurs.items():
            if len(items) >= len(adj[junction]):
                items.remove(max(items, key=lambda t: (t[0], -t[1])))
            for _, _, nodes in items:
                _remove_chain(adj, nodes[:-1] + [nodes[-1]])


def _components(adj) -> list[list[int]]:
    seen, comps = set(), []
    for n in sorted(adj):
        if n in seen:
            continue
        stack, comp = [n], []
        seen.add(n)
        while stack:
            cur = stack.pop()
            comp.append(cur)
            for nb in adj[cur]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comps.append(sorted(comp))
    return comps


def _component_length(adj, comp) -> float:
    return 0.5 * sum(w for n in comp for w in adj[n].values())


def _chains(adj) -> list[list[int]]:
    done: set[tuple[int, int]] = set()
    chains = []

    def take(a, b):
        nodes, _ = _walk(adj, a, b)
        for x, y in zip(nodes[:-1], nodes[1:]):
            done.add((x, y))
            done.add((y, x))
        chains.append(nodes)

    for n in sorted(adj):
        if len(adj[n]) != 2:
            for nb in sorted(adj[n]):
                if (n, nb) not in done:
                    take(n, nb)
    for n in sorted(adj):           # pure cycles
        for nb in sorted(adj[n]):
            if (n, nb) not in done:
                take(n, nb)
    return chains


def _longest_path(adj, comp: list[int]) -> tuple[list[int], float]:
    index = {n: i for i, n in enumerate(comp)}
    rows, cols, data = [], [], []
    for n in comp:
        for nb, w in adj[n].items():
            rows.append(index[n])
            cols.append(index[nb])
            data.append(w)
    graph = coo_matrix((data, (rows, cols)), shape=(len(comp), len(comp))).tocsr()
    d0 = dijkstra(graph, indices=0)
    a = int(np.argmax(d0))
    d1, pred = dijkstra(graph, indices=a, return_predecessors=True)
    b = int(np.argmax(d1))
    path = [b]
    while path[-1] != a:
        path.append(int(pred[path[-1]]))
    return [comp[i] for i in path], float(d1[b])


def _oriented(coords: np.ndarray) -> np.ndarray:
    if tuple(coords[-1]) < tuple(coords[0]):
        return coords[::-1].copy()
    return coords


# =============================================================================
# Public
# =============================================================================

def extract_centerlines(
    polygon,
    min_branch_len: float,
    *,
    densify: float = 0.25,
    mode: str = "prune",
    smooth_iters: int = 0,
    spur_ratio: float = 1.5,
) -> list[LineString]:
    """
    Centerlines of `polygon` from interior Voronoi edges.

    mode="prune"   -> every chain between junctions/ends of the pruned graph
    mode="longest" -> only the longest path (one polyline at most)
    An empty list means the polygon has no usable centerline.
    """
    if mode not in CENTERLINE_MODES:
        raise ValueError(f"mode must be one of {CENTERLINE_MODES}, got {mode!r}")
    lines: list[tuple[float, LineString]] = []
    for poly in polygon_parts(polygon):
        built = _medial_graph(poly, densify)
        if built is None:
            continue
        adj, xy, radius = built
        _prune(adj, radius, min_branch_len, spur_ratio)
        for comp in _components(adj):
            if _component_length(adj, comp) < min_branch_len:
                continue
            if mode == "longest":
                path, length = _longest_path(adj, comp)
                candidates = [(path, length)]
            else:
                sub = {n: adj[n] for n in comp}
                candidates = []
                for nodes in _chains(sub):
                    length = sum(adj[a][b] for a, b in zip(nodes[:-1], nodes[1:]))
                    candidates.append((nodes, length))
            for nodes, length in candidates:
                closed = nodes[0] == nodes[-1]
                coords = xy[nodes]
                if not closed:
                    coords = _oriented(coords)
                if smooth_iters:
                    coords = chaikin(coords[:-1] if closed else coords, smooth_iters, closed=closed)
                    if closed:
                        coords = np.vstack([coords, coords[:1]])
                lines.append((length, as_polyline(coords)))

    lines.sort(key=lambda t: (-t[0], tuple(t[1].coords[0])))
    if mode == "longest":
        lines = [t for t in lines[:1] if t[0] >= min_branch_len]
    logger.debug("centerlines (%s): %d", mode, len(lines))
    return [line for _, line in lines]
