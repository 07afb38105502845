__all__ = [
"Circle2D",
"SplitPiece",
"polygon_parts",
"alphashape",
"extract_centerlines",
"resample_polyline",
"chaikin",
"split_polygon_by_centerline",
"grid_partition",
"intersect",
"min_enclosing_circle",
"ray_sample_polygon",
"fit_line_angle",
"rotate_z",
"rotate_plane",
]


from .contract import Circle2D, SplitPiece, polygon_parts
from .alpha import alphashape
from .centerline import extract_centerlines, resample_polyline, chaikin
from .split import split_polygon_by_centerline, grid_partition, intersect
from .circle import min_enclosing_circle, ray_sample_polygon
from .fit import fit_line_angle, rotate_z, rotate_plane
