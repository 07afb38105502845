from __future__ import annotations

from pathlib import Path
from typing import Literal

from cyclopts import App

from cli import stages
from cli.options import StageOptions, resolve


def setup(app: App) -> None:
    @app.command(name="synth")
    def synth_cmd(
        spec: Path | None = None,
        /,
        *,
        seed: int = 0,
        cloud_format: Literal["ply", "csv"] = "ply",
        opts: StageOptions | None = None,
    ) -> None:
        """
        Generate a labeled synthetic scene with ground truth (out/synth/).

        Parameters
        ----------
        spec
            Scene spec JSON; the 200 m preset when omitted.
        seed
            Seed of the preset scene.
        cloud_format
            Point cloud file format.
        """
        path = stages.synth(resolve(opts), spec, seed=seed, cloud_format=cloud_format)
        print(path)
