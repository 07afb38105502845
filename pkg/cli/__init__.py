__all__ = [
"stages",
"StageOptions",
]


from . import stages
from .options import StageOptions
