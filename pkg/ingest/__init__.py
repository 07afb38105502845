__all__ = [
"LabeledCloud",
"Semantic",
"Part",
"NO_PART",
"PLANE_LIKE",
"POLE_LIKE",
"PreprocessParams",
"load_cloud",
"save_cloud",
"preprocess",
]


from .contract import LabeledCloud, Semantic, Part, NO_PART, PLANE_LIKE, POLE_LIKE, PreprocessParams
from .loader import load_cloud, save_cloud
from .preprocess import preprocess
