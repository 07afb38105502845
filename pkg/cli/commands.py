from __future__ import annotations

import json
from pathlib import Path

from cyclopts import App

from config import schema
from . import stages
from .options import StageOptions, resolve


def setup(app: App) -> None:
    @app.command(name="run")
    def run_cmd(cloud: Path, /, *, opts: StageOptions | None = None) -> None:
        """segment -> extract -> build -> evaluate -> report in one go."""
        report = stages.run(cloud, resolve(opts))
        print(report.table().to_string())

    @app.command(name="schema")
    def schema_cmd() -> None:
        """Print the JSON schema of the pipeline configuration file."""
        print(json.dumps(schema(), indent=2, sort_keys=True))
