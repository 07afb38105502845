from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from plyfile import PlyData, PlyElement, PlyParseError

from errors import ConfigError, MissingFileError, ParseError
from .contract import Mesh

logger = logging.getLogger(__name__)

MESH_FORMATS = ("obj", "ply")
_HEADER = "# roadtwin mesh"


def _fmt(v: float) -> str:
    return format(v, ".17g")


# =============================================================================
# OBJ
# =============================================================================

def obj_text(meshes) -> str:
    lines = [_HEADER]
    base = 1
    for mesh in meshes:
        lines.append(f"o {mesh.name or 'mesh'}")
        lines.extend(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in mesh.vertices.tolist())
        lines.extend(f"f {a + base} {b + base} {c + base}" for a, b, c in mesh.faces.tolist())
        base += len(mesh.vertices)
    return "\n".join(lines) + "\n"


def read_obj(path: str | Path) -> list[Mesh]:
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"mesh file not found: {p}")
    groups: list[tuple[str, list, list]] = []
    verts_total = 0
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        try:
            if fields[0] == "o":
                groups.append((" ".join(fields[1:]), [], []))
            elif fields[0] == "v":
                if not groups:
                    groups.append(("", [], []))
                groups[-1][1].append([float(c) for c in fields[1:4]])
            elif fields[0] == "f":
                idx = [int(tok.split("/")[0]) for tok in fields[1:4]]
                groups[-1][2].append(idx)
        except (ValueError, IndexError):
            raise ParseError(f"{p}:{lineno}: cannot parse {line!r}") from None

    meshes = []
    for name, verts, faces in groups:
        f = np.asarray(faces, dtype=np.int64).reshape(-1, 3) - 1 - verts_total
        meshes.append(Mesh(np.asarray(verts, dtype=np.float64).reshape(-1, 3), f, name))
        verts_total += len(verts)
    return meshes


# =============================================================================
# PLY (binary little-endian; objects listed in comments)
# =============================================================================

def ply_data(meshes) -> PlyData:
    meshes = list(meshes)
    merged = Mesh.merge(meshes)
    vertex = np.empty(len(merged.vertices), dtype=[("x", "<f8"), ("y", "<f8"), ("z", "<f8")])
    vertex["x"], vertex["y"], vertex["z"] = merged.vertices.T
    face = np.empty(len(merged.faces), dtype=[("vertex_indices", "<i4", (3,))])
    face["vertex_indices"] = merged.faces
    comments = []
    v0 = f0 = 0
    for mesh in meshes:
        comments.append(f"object {mesh.name or 'mesh'} {v0} {len(mesh.vertices)} {f0} {len(mesh.faces)}")
        v0 += len(mesh.vertices)
        f0 += len(mesh.faces)
    return PlyData(
        [PlyElement.describe(vertex, "vertex"), PlyElement.describe(face, "face")],
        text=False,
        byte_order="<",
        comments=comments,
    )


def read_ply(path: str | Path) -> list[Mesh]:
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"mesh file not found: {p}")
    try:
        ply = PlyData.read(str(p))
        v = ply["vertex"].data
        verts = np.column_stack([v["x"], v["y"], v["z"]]).astype(np.float64)
        raw = ply["face"].data["vertex_indices"]
        faces = np.vstack([np.asarray(f, dtype=np.int64) for f in raw]) if len(raw) else np.zeros((0, 3), np.int64)
    except (PlyParseError, KeyError, ValueError) as exc:
        raise ParseError(f"{p}: {exc}") from None

    meshes = []
    for comment in ply.comments:
        fields = comment.split()
        if len(fields) != 6 or fields[0] != "object":
            continue
        name, vs, vc, fs, fc = fields[1], *map(int, fields[2:])
        meshes.append(Mesh(verts[vs:vs + vc], faces[fs:fs + fc] - vs, name))
    if not meshes and len(verts):
        meshes.append(Mesh(verts, faces))
    return meshes


# =============================================================================
# Public
# =============================================================================

def export(meshes, path: str | Path, fmt: str | None = None) -> Path:
    """Write meshes as named objects of one OBJ or PLY file; format from `fmt` or the suffix."""
    p = Path(path)
    fmt = (fmt or p.suffix.lstrip(".")).lower()
    if fmt not in MESH_FORMATS:
        raise ConfigError(f"mesh format must be one of {MESH_FORMATS}, got {fmt!r}")
    meshes = list(meshes)
    p.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "obj":
        p.write_text(obj_text(meshes), encoding="utf-8", newline="\n")
    else:
        ply_data(meshes).write(str(p))
    logger.debug("wrote %d mesh(es) to %s", len(meshes), p)
    return p


def read_meshes(path: str | Path) -> list[Mesh]:
    return read_obj(path) if Path(path).suffix.lower() == ".obj" else read_ply(path)
