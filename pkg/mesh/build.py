from __future__ import annotations

import logging

import numpy as np
import shapely
from shapely.geometry import Polygon

from errors import CorrespondenceError, DataError, TriangulationError
from geostore.contract import GeometryRecord, Polygon3D, RecordKind, SurfacePair
from .contract import Mesh, MeshOptions
from .triangulate import triangulate_2d, triangulate_3d

logger = logging.getLogger(__name__)

_COINCIDENT = 1e-12


def _outward(mesh: Mesh) -> Mesh:
    return mesh.flipped() if mesh.signed_volume < 0 else mesh


def _walls(top: list[np.ndarray], bottom: list[np.ndarray], top_start: int, bottom_start: int, vertices) -> list[tuple]:
    """Two triangles (A, C, D) and (A, D, B) per ring edge A->B over its partner C->D."""
    faces = []
    t_off, b_off = top_start, bottom_start
    for ring_t, ring_b in zip(top, bottom):
        n = len(ring_t)
        for k in range(n):
            a, b = t_off + k, t_off + (k + 1) % n
            c, d = b_off + k, b_off + (k + 1) % n
            ac = np.linalg.norm(vertices[a] - vertices[c]) <= _COINCIDENT
            bd = np.linalg.norm(vertices[b] - vertices[d]) <= _COINCIDENT
            if ac and bd:
                continue
            if not ac:
                faces.append((a, c, d))
            if not bd:
                faces.append((a, d, b))
        t_off += n
        b_off += n
    return faces


def mesh_pair(front: Polygon3D, back: Polygon3D, name: str = "") -> Mesh:
    """Closed solid between two index-aligned polygons: both caps plus side walls."""
    if front.signature != back.signature:
        raise CorrespondenceError(f"{name or 'pair'}: front {front.signature} vs back {back.signature}")
    f_rings, b_rings = front.rings(), back.rings()
    vertices = np.vstack(f_rings + b_rings)
    offset = sum(len(r) for r in f_rings)
    f_caps = triangulate_3d(f_rings)
    b_caps = triangulate_3d(b_rings)[:, ::-1] + offset
    walls = np.asarray(_walls(f_rings, b_rings, 0, offset, vertices), dtype=np.int64).reshape(-1, 3)
    return _outward(Mesh(vertices, np.vstack([f_caps, b_caps, walls]), name))


def mesh_surface_pair(pair: SurfacePair, name: str = "") -> Mesh:
    return Mesh.merge([mesh_pair(f, b) for f, b in zip(pair.front, pair.back)], name)


def mesh_ring_series(rings, name: str = "") -> Mesh:
    """Loft through consecutive rings; caps on the first and last ring."""
    rings = list(rings)
    if len(rings) < 2:
        raise DataError(f"{name or 'ring series'}: lofting needs >= 2 rings, got {len(rings)}")
    arrays = [r.shell_array() for r in rings]
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise CorrespondenceError(f"{name or 'ring series'}: rings differ in vertex count {[len(a) for a in arrays]}")
    vertices = np.vstack(arrays)
    faces = [triangulate_3d([arrays[0]]), triangulate_3d([arrays[-1]])[:, ::-1] + n * (len(arrays) - 1)]
    for k in range(len(arrays) - 1):
        faces.append(np.asarray(_walls([arrays[k]], [arrays[k + 1]], k * n, (k + 1) * n, vertices), dtype=np.int64).reshape(-1, 3))
    return _outward(Mesh(vertices, np.vstack(faces), name))


def mesh_plane_like(polygons, options: MeshOptions | None = None, name: str = "MultiPolygon") -> Mesh:
    """Upward-facing triangles per polygon, or closed prisms when options.thickness > 0."""
    options = options or MeshOptions()
    parts = []
    for i, poly in enumerate(polygons):
        try:
            rings = poly.rings()
            flat = Polygon(rings[0][:, :2], [h[:, :2] for h in rings[1:]])
            if not shapely.is_valid(flat):
                raise TriangulationError(f"invalid footprint ({shapely.is_valid_reason(flat)})")
            if options.thickness > 0:
                drop = np.array([0.0, 0.0, options.thickness])
                parts.append(mesh_pair(poly, poly.map(lambda r: r - drop)))
                continue
            faces = triangulate_2d(rings[0][:, :2], [h[:, :2] for h in rings[1:]])
            mesh = Mesh(np.vstack(rings), faces)
            if len(mesh) and mesh.face_normals()[:, 2].sum() < 0:
                mesh = mesh.flipped()
            parts.append(mesh)
        except TriangulationError as exc:
            raise TriangulationError(f"{name}.Polygon_{i}: {exc}") from None
    return Mesh.merge(parts, name)


def build_record_mesh(record: GeometryRecord, options: MeshOptions | None = None) -> list[Mesh]:
    """One mesh per leaf group, named by its key path."""
    options = options or MeshOptions()
    try:
        if record.kind is RecordKind.PlaneLike:
            return [mesh_plane_like(record.multipolygon, options)]
        if record.kind is RecordKind.Guardrail:
            return [mesh_surface_pair(seg, f"Guardrail_{i}") for i, seg in enumerate(record.guardrails)]
        meshes = []
        for i, pole in enumerate(record.poles):
            meshes.append(_rings_or_cap(pole, f"Poles/Pole_{i}"))
        for i, panel in enumerate(record.panels):
            meshes.append(mesh_surface_pair(panel, f"Panels/Panel_{i}"))
        for i, light in enumerate(record.lights):
            meshes.append(_rings_or_cap(light, f"Lights/Light_{i}"))
        return meshes
    except (TriangulationError, CorrespondenceError) as exc:
        raise type(exc)(f"{record.record_id}: {exc}") from None


def _rings_or_cap(rings, name: str) -> Mesh:
    if len(rings) >= 2:
        return mesh_ring_series(rings, name)
    logger.warning("%s has a single ring; emitting a flat cap", name)
    arr = rings[0].shell_array()
    return Mesh(arr, triangulate_3d([arr]), name)
