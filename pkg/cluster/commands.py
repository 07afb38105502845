from __future__ import annotations

from pathlib import Path

from cyclopts import App

from cli import stages
from cli.options import StageOptions, resolve


def setup(app: App) -> None:
    @app.command(name="segment")
    def segment_cmd(cloud: Path, /, *, opts: StageOptions | None = None) -> None:
        """Preprocess a labeled cloud and cluster it into instances (out/segment/)."""
        stages.segment(cloud, resolve(opts))
