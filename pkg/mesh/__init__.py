__all__ = [
"Mesh",
"MeshOptions",
"triangulate_2d",
"triangulate_3d",
"mesh_plane_like",
"mesh_pair",
"mesh_ring_series",
"build_record_mesh",
"export",
"read_obj",
"read_ply",
"read_meshes",
]


from .contract import Mesh, MeshOptions
from .triangulate import triangulate_2d, triangulate_3d
from .build import mesh_plane_like, mesh_pair, mesh_ring_series, build_record_mesh
from .export import export, read_obj, read_ply, read_meshes
