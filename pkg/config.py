import json
import logging
import os
import sys
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from cluster.contract import ClusterConfig
from errors import ConfigError
from extract.contract import ExtractConfig
from ingest.contract import PreprocessParams
from mesh.contract import MeshOptions

load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"


class Setting:
    LOG_LEVEL = os.getenv("TWIN_LOG_LEVEL", "INFO").upper()
    DEBUG = os.getenv("TWIN_DEBUG", "0").strip().lower() in ("1", "true", "yes")
    OUT_DIR = os.getenv("TWIN_OUT_DIR", "out")

    try:
        THREADS = int(os.getenv("TWIN_THREADS", "1"))
    except ValueError:
        print("TWIN_THREADS must be an integer. Check .env", file=sys.stderr)
        raise SystemExit(2)
    if THREADS < 1:
        print("TWIN_THREADS must be >= 1. Check .env", file=sys.stderr)
        raise SystemExit(2)
    if LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        print(f"Unknown TWIN_LOG_LEVEL {LOG_LEVEL!r}. Check .env", file=sys.stderr)
        raise SystemExit(2)

settings = Setting()


def setup_logging(level: str | None = None) -> None:
    level = "DEBUG" if settings.DEBUG else (level or settings.LOG_LEVEL)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


# =============================================================================
# Pipeline configuration
# =============================================================================

class PipelineConfig(BaseModel):
    """Everything one pipeline run reads; JSON file < flags, validated as a whole."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    preprocess: PreprocessParams = PreprocessParams()
    cluster: ClusterConfig = ClusterConfig()
    extract: ExtractConfig = ExtractConfig()
    mesh: MeshOptions = MeshOptions()
    out_dir: str = Field(default_factory=lambda: settings.OUT_DIR, description="stage folders are created below it")
    threads: int = Field(default_factory=lambda: settings.THREADS, ge=1, description="workers per stage")
    mesh_format: Literal["obj", "ply"] = "obj"
    segment_id: str = Field("seg0", min_length=1, pattern=r"^[A-Za-z0-9-]+$")
    raw_gt: bool = Field(False, description="evaluate against raw instead of preprocessed instance points")


def deep_merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> PipelineConfig:
    data: dict = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}: not valid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{p}: expected a JSON object at the top level")
    # partial sections (e.g. only cluster.RoadLane.eps) are completed from the defaults
    data = deep_merge(deep_merge(PipelineConfig().model_dump(mode="json"), data), overrides or {})
    try:
        return PipelineConfig.model_validate(data)
    except PydanticValidationError as exc:
        problems = [f"{'.'.join(str(x) for x in err['loc'])}: {err['msg']}" for err in exc.errors()]
        raise ConfigError("invalid configuration\n  " + "\n  ".join(problems)) from None


def schema() -> dict:
    return PipelineConfig.model_json_schema()
