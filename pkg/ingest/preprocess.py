from __future__ import annotations

import logging

import numpy as np
from scipy.spatial import cKDTree

from errors import EmptyResultError
from .contract import LabeledCloud, PreprocessParams

logger = logging.getLogger(__name__)


def voxel_representatives(points: np.ndarray, voxel_size: float) -> np.ndarray:
    """Indices (ascending) of one real point per occupied voxel: the one nearest the voxel centroid."""
    n = len(points)
    keys = np.floor(points / voxel_size).astype(np.int64)
    _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    sums = np.zeros((len(counts), points.shape[1]))
    np.add.at(sums, inverse, points)
    centroids = sums / counts[:, None]
    dist = np.linalg.norm(points - centroids[inverse], axis=1)
    # lowest distance per voxel, ties to the lowest input index
    order = np.lexsort((np.arange(n), dist, inverse))
    first = np.ones(n, dtype=bool)
    first[1:] = inverse[order][1:] != inverse[order][:-1]
    return np.sort(order[first])


def statistical_inliers(points: np.ndarray, neighbors: int, std_ratio: float) -> np.ndarray:
    """Mask of points whose mean kNN distance is within mean + std_ratio * std of all points."""
    n = len(points)
    if n < 2:
        return np.ones(n, dtype=bool)
    k = min(neighbors, n - 1) + 1
    dist, _ = cKDTree(points).query(points, k=k)
    mean_d = dist[:, 1:].mean(axis=1)
    threshold = mean_d.mean() + std_ratio * mean_d.std()
    return mean_d <= threshold


def preprocess(cloud: LabeledCloud, params: PreprocessParams) -> LabeledCloud:
    if len(cloud) == 0:
        raise EmptyResultError("cannot preprocess an empty cloud")
    if params.voxel_size == 0 and params.outlier_std_ratio == 0:
        return cloud

    out = cloud
    if params.voxel_size > 0:
        keep = voxel_representatives(out.points, params.voxel_size)
        out = out.subset(keep)
        logger.debug("voxel %.3f m: %d -> %d points", params.voxel_size, len(cloud), len(out))
    if params.outlier_std_ratio > 0:
        before = len(out)
        out = out.subset(np.flatnonzero(
            statistical_inliers(out.points, params.outlier_neighbors, params.outlier_std_ratio)
        ))
        logger.debug("outlier removal: %d -> %d points", before, len(out))
    if len(out) == 0:
        raise EmptyResultError("preprocessing removed every point")
    return out
