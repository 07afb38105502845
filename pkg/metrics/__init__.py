__all__ = [
"TriangleIndex",
"unsigned_distance",
"brute_force_distance",
"closest_points_on_triangles",
"DistanceStats",
"DistanceReport",
"TimingReport",
"evaluate",
"timing",
]


from .distance import TriangleIndex, unsigned_distance, brute_force_distance, closest_points_on_triangles
from .report import DistanceStats, DistanceReport, TimingReport, evaluate, timing
