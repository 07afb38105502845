from __future__ import annotations

from cyclopts import App

from cli import stages
from cli.options import StageOptions, resolve


def setup(app: App) -> None:
    @app.command(name="extract")
    def extract_cmd(*, opts: StageOptions | None = None) -> None:
        """Turn every segmented instance into a JSON geometry record (out/extract/)."""
        stages.extract(resolve(opts))
