__all__ = [
"Polygon3D",
"MultiPolygon3D",
"SurfacePair",
"RecordKind",
"RecordMeta",
"GeometryRecord",
"to_json",
"from_json",
"write_record",
"read_record",
"write_manifest",
"read_manifest",
"size_report",
]


from .contract import Polygon3D, MultiPolygon3D, SurfacePair, RecordKind, RecordMeta, GeometryRecord
from .codec import to_json, from_json
from .store import write_record, read_record, write_manifest, read_manifest, size_report
