from __future__ import annotations

from cyclopts import App

from cli import stages
from cli.options import StageOptions, resolve


def setup(app: App) -> None:
    @app.command(name="evaluate")
    def evaluate_cmd(*, raw_gt: bool = False, opts: StageOptions | None = None) -> None:
        """
        Distance from instance points to their meshes (out/evaluate/).

        Parameters
        ----------
        raw_gt
            Use the raw instead of the preprocessed instance points as ground truth.
        """
        extra = {"raw_gt": True} if raw_gt else {}
        report = stages.evaluate(resolve(opts, **extra))
        print(report.table().to_string())

    @app.command(name="report")
    def report_cmd(*, opts: StageOptions | None = None) -> None:
        """Timing, storage and distance tables with charts (out/report/)."""
        stages.report(resolve(opts))

    @app.command(name="sweep")
    def sweep_cmd(*, grid_sizes: list[float] | None = None, opts: StageOptions | None = None) -> None:
        """
        Re-extract plane-like instances over several grid sizes (out/sweep/).

        Parameters
        ----------
        grid_sizes
            Square cell sizes in meters; default 2.0 1.5 1.0 0.5.
        """
        df = stages.sweep(resolve(opts), grid_sizes or stages.DEFAULT_GRID_SIZES)
        print(df.to_string(index=False))
