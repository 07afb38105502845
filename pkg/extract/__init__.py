__all__ = [
"ExtractConfig",
"BlockTransform",
"GuardrailExtraction",
"extract_plane_like",
"extract_guardrail",
"extract_pole",
"extract_panel",
"extract_light",
"extract_instance",
]


from .contract import ExtractConfig, BlockTransform, GuardrailExtraction
from .plane import extract_plane_like
from .guardrail import extract_guardrail
from .pole import extract_pole, extract_panel, extract_light
from .instance import extract_instance
