from __future__ import annotations

import numpy as np
import pandas as pd

from ingest.contract import Semantic

CENSUS_COLUMNS = ["asset", "count", "total_length", "mean_length"]


def obb_length(points: np.ndarray) -> float:
    """Longest side of an oriented bounding box: PCA axes in XY, plain extent in Z."""
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 2:
        return 0.0
    xy = pts[:, :2] - pts[:, :2].mean(axis=0)
    _, _, vt = np.linalg.svd(xy, full_matrices=False)
    local = xy @ vt.T
    extents = np.ptp(local, axis=0).tolist() + [float(np.ptp(pts[:, 2]))]
    return float(max(extents))


def census(instances) -> pd.DataFrame:
    """Per-asset instance count and OBB lengths; `instances` is a sequence of (Semantic, points-like)."""
    lengths: dict[Semantic, list[float]] = {s: [] for s in Semantic}
    for semantic, cloud in instances:
        pts = getattr(cloud, "points", cloud)
        lengths[Semantic(semantic)].append(obb_length(pts))
    rows = []
    for semantic in Semantic:
        values = lengths[semantic]
        rows.append({
            "asset": semantic.name,
            "count": len(values),
            "total_length": round(float(np.sum(values)), 3) if values else 0.0,
            "mean_length": round(float(np.mean(values)), 3) if values else 0.0,
        })
    return pd.DataFrame(rows, columns=CENSUS_COLUMNS)
