"""
Road frame and surface samplers.

Positions are given as (station s, offset t): s runs along a constant-curvature centerline
starting at the origin heading +x, t is measured along the left normal. Every sampler
returns exact surface points; noise is added by the caller.
"""

from __future__ import annotations

import numpy as np

from geostore.contract import Polygon3D
from mesh import Mesh, mesh_ring_series
from .contract import SceneSpec

GT_STEP = 0.5       # m, station spacing of ground-truth meshes
GT_SIDES = 32       # polygon sides of ground-truth cylinders


def _count(density: float, area: float) -> int:
    return max(int(round(density * area)), 0)


class RoadFrame:
    def __init__(self, spec: SceneSpec):
        self.spec = spec
        self.k = float(spec.curvature)
        self.amplitude = float(spec.elevation_amplitude)
        self.wavelength = float(spec.elevation_wavelength)
        spans = spec.carriageway_spans
        self._lo, self._hi = spans[0][0], spans[-1][1]

    def heading(self, s) -> np.ndarray:
        return self.k * np.asarray(s, dtype=np.float64)

    def center(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        if abs(self.k) < 1e-12:
            return np.column_stack([s, np.zeros_like(s)])
        return np.column_stack([np.sin(self.k * s) / self.k, (1.0 - np.cos(self.k * s)) / self.k])

    def tangent(self, s) -> np.ndarray:
        psi = self.heading(s)
        return np.column_stack([np.cos(psi), np.sin(psi)])

    def normal(self, s) -> np.ndarray:
        psi = self.heading(s)
        return np.column_stack([-np.sin(psi), np.cos(psi)])

    def ground(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        return self.amplitude * np.sin(2.0 * np.pi * s / self.wavelength)

    def height(self, s, t) -> np.ndarray:
        """Terrain height; verges rise with the grade away from the carriageway edge."""
        t = np.asarray(t, dtype=np.float64)
        outside = np.maximum(t - self._hi, 0.0) + np.maximum(self._lo - t, 0.0)
        return self.ground(s) + self.spec.verge_grade * outside

    def xy(self, s, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64).reshape(-1)
        return self.center(s) + t[:, None] * self.normal(s)

    def world(self, s, t, h=0.0) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), s.shape)
        h = np.broadcast_to(np.asarray(h, dtype=np.float64), s.shape)
        return np.column_stack([self.xy(s, t), self.height(s, t) + h])


# =============================================================================
# Strips (plane-like)
# =============================================================================

def sample_strip(frame: RoadFrame, s0, s1, t0, t1, density, rng) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uniform (s, t) samples of a terrain strip; returns (points, s, t)."""
    n = _count(density, (s1 - s0) * (t1 - t0))
    s = rng.uniform(s0, s1, n)
    t = rng.uniform(t0, t1, n)
    return frame.world(s, t), s, t


def _stations(s0: float, s1: float, step: float = GT_STEP) -> np.ndarray:
    return np.linspace(s0, s1, max(int(np.ceil((s1 - s0) / step)), 1) + 1)


def strip_mesh(frame: RoadFrame, s0, s1, t0, t1, name: str = "") -> Mesh:
    """Upward-facing grid over the strip; cross-section split where the verge grade changes."""
    st = _stations(s0, s1)
    cuts = [t for t in (frame._lo, frame._hi) if t0 < t < t1]
    ts = np.array(sorted({t0, t1, *cuts}))
    S, T = np.meshgrid(st, ts, indexing="ij")
    vertices = frame.world(S.ravel(), T.ravel())
    m = len(ts)
    i, j = np.meshgrid(np.arange(len(st) - 1), np.arange(m - 1), indexing="ij")
    a = (i * m + j).ravel()
    b, c, d = a + m, a + m + 1, a + 1
    faces = np.vstack([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
    return Mesh(vertices, faces, name)


# =============================================================================
# Cylinders and boxes (pole-like)
# =============================================================================

def _basis(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = np.asarray(axis, dtype=np.float64)
    a = a / np.linalg.norm(a)
    helper = np.array([0.0, 0.0, 1.0]) if abs(a[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, a)
    e1 /= np.linalg.norm(e1)
    return a, e1, np.cross(a, e1)


def sample_cylinder(origin, axis, length, r0, r1, density, rng, start: float = 0.0) -> np.ndarray:
    """Lateral surface of a (tapered) cylinder, u in [start, length] along the axis."""
    a, e1, e2 = _basis(axis)
    n = _count(density, np.pi * (r0 + r1) * (length - start))
    u = rng.uniform(start, length, n)
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    r = r0 + (r1 - r0) * u / length
    return (
        np.asarray(origin, dtype=np.float64)
        + u[:, None] * a
        + (r * np.cos(phi))[:, None] * e1
        + (r * np.sin(phi))[:, None] * e2
    )


def cylinder_mesh(origin, axis, length, r0, r1, name: str = "", start: float = 0.0) -> Mesh:
    a, e1, e2 = _basis(axis)
    phi = np.linspace(0.0, 2.0 * np.pi, GT_SIDES, endpoint=False)
    rings = []
    for u in _stations(start, length):
        r = r0 + (r1 - r0) * u / length
        ring = np.asarray(origin) + u * a + r * (np.outer(np.cos(phi), e1) + np.outer(np.sin(phi), e2))
        rings.append(Polygon3D.from_arrays(ring))
    return mesh_ring_series(rings, name)


def sample_box(center, axes, half, density, rng) -> np.ndarray:
    """All six faces of an oriented box; `axes` rows are unit vectors, `half` the half sizes."""
    center = np.asarray(center, dtype=np.float64)
    axes = np.asarray(axes, dtype=np.float64)
    half = np.asarray(half, dtype=np.float64)
    out = []
    for k in range(3):
        i, j = [m for m in range(3) if m != k]
        n = _count(density, 4.0 * half[i] * half[j])
        for sign in (-1.0, 1.0):
            local = np.zeros((n, 3))
            local[:, i] = rng.uniform(-half[i], half[i], n)
            local[:, j] = rng.uniform(-half[j], half[j], n)
            local[:, k] = sign * half[k]
            out.append(center + local @ axes)
    return np.vstack(out)


def sample_disc_plate(center, axes, radius, half_thickness, density, rng) -> np.ndarray:
    """Round plate: both faces in the (axes[0], axes[2]) plane plus the rim; axes[1] is the face normal."""
    center = np.asarray(center, dtype=np.float64)
    u, n_axis, v = np.asarray(axes, dtype=np.float64)
    out = []
    n_face = _count(density, np.pi * radius ** 2)
    for sign in (-1.0, 1.0):
        r = radius * np.sqrt(rng.uniform(0.0, 1.0, n_face))
        phi = rng.uniform(0.0, 2.0 * np.pi, n_face)
        out.append(center + sign * half_thickness * n_axis + np.outer(r * np.cos(phi), u) + np.outer(r * np.sin(phi), v))
    n_rim = _count(density, 2.0 * np.pi * radius * 2.0 * half_thickness)
    phi = rng.uniform(0.0, 2.0 * np.pi, n_rim)
    w = rng.uniform(-half_thickness, half_thickness, n_rim)
    out.append(center + np.outer(w, n_axis) + radius * (np.outer(np.cos(phi), u) + np.outer(np.sin(phi), v)))
    return np.vstack(out)


def plate_mesh(center, axes, outline_2d: np.ndarray, half_thickness, name: str = "") -> Mesh:
    """Closed plate: `outline_2d` (k, 2) in the (axes[0], axes[2]) plane, extruded along axes[1]."""
    u, n_axis, v = np.asarray(axes, dtype=np.float64)
    face = np.asarray(center) + np.outer(outline_2d[:, 0], u) + np.outer(outline_2d[:, 1], v)
    rings = [Polygon3D.from_arrays(face - half_thickness * n_axis), Polygon3D.from_arrays(face + half_thickness * n_axis)]
    return mesh_ring_series(rings, name)


# =============================================================================
# Extrusions along the road (guardrail)
# =============================================================================

def sample_path_boxes(frame: RoadFrame, offset: float, boxes, density, rng) -> np.ndarray:
    """
    Surfaces of boxes given in path coordinates (s0, s1, y0, y1, z0, z1): s along the road,
    y across it relative to `offset`, z above the terrain at `offset`. Points falling inside
    another box of the same set are dropped.
    """
    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 6)
    local = []
    for box in boxes:
        lo, hi = box[0::2], box[1::2]
        size = hi - lo
        for k in range(3):
            i, j = [m for m in range(3) if m != k]
            n = _count(density, size[i] * size[j])
            for face in (lo[k], hi[k]):
                p = np.empty((n, 3))
                p[:, i] = rng.uniform(lo[i], hi[i], n)
                p[:, j] = rng.uniform(lo[j], hi[j], n)
                p[:, k] = face
                local.append(p)
    local = np.vstack(local) if local else np.zeros((0, 3))
    keep = np.ones(len(local), dtype=bool)
    for box in boxes:
        inside = np.all((local > box[0::2] + 1e-9) & (local < box[1::2] - 1e-9), axis=1)
        keep &= ~inside
    local = local[keep]
    return _path_to_world(frame, offset, local)


def _path_to_world(frame: RoadFrame, offset: float, local: np.ndarray) -> np.ndarray:
    s, y, z = local[:, 0], local[:, 1], local[:, 2]
    xy = frame.center(s) + (offset + y)[:, None] * frame.normal(s)
    base = frame.height(s, np.full_like(s, offset))
    return np.column_stack([xy, base + z])


def path_box_mesh(frame: RoadFrame, offset: float, box, name: str = "") -> Mesh:
    s0, s1, y0, y1, z0, z1 = box
    section = np.array([[y0, z0], [y1, z0], [y1, z1], [y0, z1]])
    rings = []
    for s in _stations(s0, s1):
        local = np.column_stack([np.full(4, s), section])
        rings.append(Polygon3D.from_arrays(_path_to_world(frame, offset, local)))
    return mesh_ring_series(rings, name)
