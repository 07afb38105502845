__all__ = [
"ClusterParams",
"ClusterConfig",
"Clustering",
"NOISE",
"dbscan",
"split_instances",
"split_parts",
"census",
"obb_length",
]


from .contract import ClusterParams, ClusterConfig, Clustering, NOISE
from .core import dbscan
from .instances import split_instances, split_parts
from .census import census, obb_length
