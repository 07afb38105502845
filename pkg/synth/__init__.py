__all__ = [
"SceneSpec",
"SignSpec",
"LightSpec",
"GuardrailSpec",
"RoadFrame",
"Scene",
"generate",
"validate_scene",
"write_scene",
]


from .contract import SceneSpec, SignSpec, LightSpec, GuardrailSpec
from .scene import RoadFrame
from .generate import Scene, generate, validate_scene, write_scene
