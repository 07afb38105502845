__all__ = [
"Plane",
"LiftParams",
"PolygonPair",
"ReferenceIndex",
"lift_v1",
"lift_v2",
"lift_polygon_v1",
"lift_polygon_v2",
]


from .contract import Plane, LiftParams, PolygonPair
from .core import ReferenceIndex, lift_v1, lift_v2, lift_polygon_v1, lift_polygon_v2
