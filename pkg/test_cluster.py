import math

import numpy as np
import pytest
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from cluster import ClusterConfig, ClusterParams, NOISE, census, dbscan, obb_length, split_instances, split_parts
from cluster.instances import instance_names
from conftest import cloud_of, cylinder
from errors import DegenerateInputError, InvalidInstanceError, UnlabeledPartsError
from ingest.contract import LabeledCloud, NO_PART, Part, Semantic


def brute_dbscan(pts, eps, min_pts):
    """O(n^2) density-reachability closure; ids by smallest core index, borders to the nearest core."""
    d = cdist(pts, pts)
    near = d <= eps
    core = near.sum(axis=1) >= min_pts
    labels = np.full(len(pts), NOISE)
    core_idx = np.flatnonzero(core)
    if len(core_idx) == 0:
        return labels
    _, comp = connected_components(near[np.ix_(core_idx, core_idx)], directed=False)
    first = {}
    for i, c in zip(core_idx, comp):
        first.setdefault(c, i)
    rank = {c: r for r, c in enumerate(sorted(first, key=first.get))}
    labels[core_idx] = [rank[c] for c in comp]
    for i in np.flatnonzero(~core):
        dc = d[i, core_idx]
        ok = dc <= eps
        if ok.any():
            best = dc[ok].min()
            labels[i] = labels[core_idx[ok & (dc == best)]].min()
    return labels


def test_dbscan_matches_bruteforce_oracle():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 201))
        dim = int(rng.choice([2, 3]))
        pts = rng.uniform(0.0, 10.0, (n, dim))
        eps = float(rng.uniform(0.3, 2.5))
        min_pts = int(rng.integers(1, 8))
        got = dbscan(pts, ClusterParams(eps=eps, min_pts=min_pts)).assignments
        want = brute_dbscan(pts, eps, min_pts)
        assert np.array_equal(got, want), f"seed {seed}: n={n} eps={eps:.3f} min_pts={min_pts}"


def test_dbscan_two_blobs_and_noise(rng):
    a = rng.normal(0.0, 0.05, (40, 3))
    b = rng.normal(0.0, 0.05, (40, 3)) + [5.0, 0.0, 0.0]
    pts = np.vstack([b, a, [[20.0, 20.0, 20.0]]])
    res = dbscan(pts, ClusterParams(eps=0.5, min_pts=5))
    assert res.cluster_count == 2
    assert res.noise_count == 1
    # numbering follows the smallest input index, so the blob listed first is cluster 0
    assert set(res.assignments[:40]) == {0}
    assert set(res.assignments[40:80]) == {1}


def test_dbscan_order_stable_numbering(rng):
    pts = np.vstack([rng.normal(0, 0.05, (30, 2)), rng.normal(0, 0.05, (30, 2)) + 3.0])
    perm = rng.permutation(len(pts))
    base = dbscan(pts, ClusterParams(eps=0.4, min_pts=4)).assignments
    shuffled = dbscan(pts[perm], ClusterParams(eps=0.4, min_pts=4)).assignments
    # same partition; the id of each cluster is decided by its earliest point in the new order
    pairs = set(zip(base[perm].tolist(), shuffled.tolist()))
    assert len(pairs) == 2


def _by_first_index(labels):
    """Renumber clusters by their first position; noise stays noise."""
    out = np.full(len(labels), NOISE)
    seen = {}
    for i, c in enumerate(labels.tolist()):
        if c != NOISE:
            out[i] = seen.setdefault(c, len(seen))
    return out


def test_dbscan_ignores_input_order():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 201))
        pts = rng.uniform(0.0, 10.0, (n, int(rng.choice([2, 3]))))
        params = ClusterParams(eps=float(rng.uniform(0.3, 2.5)), min_pts=int(rng.integers(1, 8)))
        perm = rng.permutation(n)
        base = dbscan(pts, params).assignments
        shuffled = np.empty(n, dtype=base.dtype)
        shuffled[perm] = dbscan(pts[perm], params).assignments
        assert np.array_equal(_by_first_index(shuffled), _by_first_index(base)), f"seed {seed}"


def test_dbscan_rejects_empty():
    with pytest.raises(DegenerateInputError):
        dbscan(np.zeros((0, 3)), ClusterParams(eps=1.0, min_pts=2))


def test_split_instances_orders_by_semantic_then_min_x(rng):
    lanes = [rng.uniform(0, 1, (100, 3)) * [3.0, 0.15, 0.0] + [x, 0.0, 0.0] for x in (16.0, 0.0, 8.0)]
    sign = cylinder(rng, radius=0.05, height=2.0, n=400, center=(3.0, 5.0))
    pts = np.vstack(lanes + [sign])
    sem = np.array([Semantic.RoadLane] * 300 + [Semantic.RoadSign] * 400, dtype=np.uint8)
    part = np.array([NO_PART] * 300 + [Part.Pole] * 400, dtype=np.uint8)
    found = split_instances(LabeledCloud(pts, sem, part), ClusterConfig().per_semantic())
    assert [s for s, _ in found] == [Semantic.RoadLane] * 3 + [Semantic.RoadSign]
    starts = [float(c.points[:, 0].min()) for _, c in found[:3]]
    assert starts == sorted(starts)
    assert instance_names(found) == ["RoadLane_0", "RoadLane_1", "RoadLane_2", "RoadSign_0"]


def test_split_parts_two_poles_one_light(rng):
    p0 = cylinder(rng, radius=0.08, height=4.0, n=2000, center=(0.0, 0.0))
    p1 = cylinder(rng, radius=0.08, height=4.0, n=2000, center=(1.0, 0.0))
    arm = rng.uniform(0.0, 1.0, (500, 3)) * [1.0, 0.1, 0.1] + [0.0, -0.05, 4.1]
    pts = np.vstack([p0, p1, arm])
    part = np.array([Part.Pole] * 4000 + [Part.Light] * 500, dtype=np.uint8)
    parts = split_parts(cloud_of(pts, Semantic.RoadLight, part), ClusterConfig().parts)
    assert len(parts[Part.Pole]) == 2
    assert len(parts[Part.Light]) == 1
    assert Part.Panel not in parts


def test_split_parts_errors(rng):
    pts = cylinder(rng, n=100)
    part = np.full(100, Part.Pole, dtype=np.uint8)
    part[0] = NO_PART
    with pytest.raises(UnlabeledPartsError):
        split_parts(cloud_of(pts, Semantic.RoadSign, part), ClusterConfig().parts)
    with pytest.raises(InvalidInstanceError):
        split_parts(cloud_of(pts, Semantic.RoadSign, Part.Panel), ClusterConfig().parts)
    with pytest.raises(InvalidInstanceError):
        split_parts(cloud_of(pts, Semantic.RoadSurface), ClusterConfig().parts)


def test_obb_length_ignores_rotation(rng):
    local = rng.uniform(0, 1, (2000, 2)) * [10.0, 2.0]
    a = math.radians(37.0)
    rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    pts = np.column_stack([local @ rot.T, rng.uniform(0, 0.5, 2000)])
    assert obb_length(pts) == pytest.approx(10.0, abs=0.05)
    # a tall thin pole is measured along Z
    assert obb_length(cylinder(rng, radius=0.1, height=6.0, n=500)) == pytest.approx(6.0, abs=0.05)


def test_census_counts_and_lengths():
    flat = np.array([[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.15, 0.0], [3.0, 0.15, 0.0]])
    table = census([(Semantic.RoadLane, flat), (Semantic.RoadLane, flat + 10.0)])
    row = table.set_index("asset").loc["RoadLane"]
    assert row["count"] == 2
    assert row["total_length"] == pytest.approx(6.0)
    assert row["mean_length"] == pytest.approx(3.0)
    assert table.set_index("asset").loc["Guardrail", "count"] == 0
    assert list(table["asset"]) == [s.name for s in Semantic]
