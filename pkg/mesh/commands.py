from __future__ import annotations

from cyclopts import App

from cli import stages
from cli.options import StageOptions, resolve


def setup(app: App) -> None:
    @app.command(name="build")
    def build_cmd(*, opts: StageOptions | None = None) -> None:
        """Mesh every JSON record to OBJ/PLY plus the merged segment mesh (out/build/)."""
        stages.build(resolve(opts))
