from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import InvariantError


class MeshOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    thickness: float = Field(0.0, ge=0, description="m; > 0 turns plane-like cells into closed prisms")
    merged: bool = Field(True, description="also write one segment-wide mesh file")


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray        # (n, 3) float64
    faces: np.ndarray           # (m, 3) int64, counter-clockwise seen from outside
    name: str = ""

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        f = np.ascontiguousarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if len(f) and (f.min() < 0 or f.max() >= len(v)):
            raise InvariantError(f"mesh {self.name!r}: face index out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @classmethod
    def empty(cls, name: str = "") -> "Mesh":
        return cls(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64), name)

    def __len__(self) -> int:
        return len(self.faces)

    def triangles(self) -> np.ndarray:
        """(m, 3, 3) corner coordinates."""
        return self.vertices[self.faces]

    def face_normals(self) -> np.ndarray:
        t = self.triangles()
        return np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])

    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_normals(), axis=1)

    @property
    def area(self) -> float:
        return float(self.face_areas().sum())

    @property
    def signed_volume(self) -> float:
        t = self.triangles()
        return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)

    def edge_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for a, b, c in self.faces.tolist():
            for e in ((a, b), (b, c), (c, a)):
                key = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
                counts[key] = counts.get(key, 0) + 1
        return counts

    @property
    def is_closed(self) -> bool:
        """Every edge shared by exactly two faces."""
        counts = self.edge_counts()
        return bool(counts) and all(n == 2 for n in counts.values())

    def flipped(self) -> "Mesh":
        return Mesh(self.vertices, self.faces[:, ::-1], self.name)

    def renamed(self, name: str) -> "Mesh":
        return Mesh(self.vertices, self.faces, name)

    @staticmethod
    def merge(meshes, name: str = "") -> "Mesh":
        meshes = list(meshes)
        if not meshes:
            return Mesh.empty(name)
        offsets = np.cumsum([0] + [len(m.vertices) for m in meshes[:-1]])
        return Mesh(
            np.vstack([m.vertices for m in meshes]),
            np.vstack([m.faces + o for m, o in zip(meshes, offsets)]),
            name,
        )
