from __future__ import annotations
import pandas as pd

from ingest.contract import PLANE_LIKE

SWEEP_COLUMNS = ["grid_size", "avg_cm", "std_cm", "points", "cells", "extract_s"]


def pooled(stats: list[tuple[int, float, float]]) -> tuple[int, float, float]:
    """Merge (count, mean, std) groups into one population (count, mean, std)."""
    stats = [s for s in stats if s[0] > 0]
    n = sum(s[0] for s in stats)
    if n == 0:
        return 0, float("nan"), float("nan")
    mean = sum(c * m for c, m, _ in stats) / n
    second = sum(c * (sd * sd + m * m) for c, m, sd in stats) / n
    return n, mean, max(second - mean * mean, 0.0) ** 0.5


def plane_like_stats(report) -> tuple[int, float, float]:
    """Pooled plane-like stats (meters) of a DistanceReport."""
    names = {s.name for s in PLANE_LIKE}
    return pooled([(s.count, s.avg, s.std) for a, s in report.assets.items() if a in names])


def sweep_rows_to_df(rows: list[dict]) -> pd.DataFrame:
    """One row per grid size: plane-like Avg/Std in cm (2 decimals), points, cells and extraction seconds."""
    if not rows:
        return pd.DataFrame(columns=SWEEP_COLUMNS)
    df = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    df[["avg_cm", "std_cm"]] = df[["avg_cm", "std_cm"]].round(2)
    df["extract_s"] = df["extract_s"].round(3)
    return df.sort_values("grid_size", ascending=False).reset_index(drop=True)
