import math

import numpy as np
import pytest
from shapely import affinity
from shapely.geometry import LineString, Polygon, box

from cluster import ClusterConfig
from conftest import cloud_of, cylinder, plane_patch
from errors import EmptyPoleError, InvalidInstanceError, NoCenterlineError
from extract import (
    BlockTransform,
    ExtractConfig,
    extract_guardrail,
    extract_instance,
    extract_light,
    extract_panel,
    extract_plane_like,
    extract_pole,
)
from extract.guardrail import straighten
from extract.pole import slab_index
from geom2d import fit_line_angle
from geostore import RecordKind
from ingest.contract import Part, Semantic

CFG = ExtractConfig()


def _ring_radius(poly):
    ring = poly.shell_array()
    return float(np.hypot(*(ring[:, :2] - ring[:, :2].mean(axis=0)).T).mean())


def _panel(rng, n=8000, yaw_deg=30.0, width=1.2, height=0.8, thickness=0.02, z0=2.0, round_radius=None):
    """Two faces of a thin board centred on (0, 0), yawed about Z."""
    if round_radius is None:
        u = rng.uniform(-width / 2, width / 2, n)
        v = rng.uniform(0.0, height, n)
    else:
        r = round_radius * np.sqrt(rng.uniform(0.0, 1.0, n))
        phi = rng.uniform(0.0, 2 * np.pi, n)
        u, v = r * np.cos(phi), round_radius + r * np.sin(phi)
    w = (rng.integers(0, 2, n) - 0.5) * thickness + rng.normal(0.0, 0.002, n)
    a = math.radians(yaw_deg)
    return np.column_stack([u * math.cos(a) - w * math.sin(a), u * math.sin(a) + w * math.cos(a), z0 + v])


def _arm(rng, n=6000, radius=0.06, length=1.5, yaw_deg=20.0, height=8.0, sigma=0.002):
    a = math.radians(yaw_deg)
    d = np.array([math.cos(a), math.sin(a), 0.0])
    side = np.array([-math.sin(a), math.cos(a), 0.0])
    up = np.array([0.0, 0.0, 1.0])
    t = rng.uniform(0.0, length, n)
    phi = rng.uniform(0.0, 2 * np.pi, n)
    r = radius + rng.normal(0.0, sigma, n)
    return np.outer(t, d) + np.outer(r * np.cos(phi), side) + np.outer(r * np.sin(phi), up) + [0.0, 0.0, height]


def _box_sides(rng, n, x1, y0, y1, z0, z1, top_bottom=True):
    """Points on the Y faces (and optionally Z faces) of an X-long box starting at x=0."""
    faces = [(y0, None), (y1, None)] + ([(None, z0), (None, z1)] if top_bottom else [])
    k = rng.integers(0, len(faces), n)
    x = rng.uniform(0.0, x1, n)
    y = rng.uniform(y0, y1, n)
    z = rng.uniform(z0, z1, n)
    for i, (fy, fz) in enumerate(faces):
        if fy is not None:
            y[k == i] = fy
        else:
            z[k == i] = fz
    return np.column_stack([x, y, z]) + rng.normal(0.0, 0.003, (n, 3))


def _t_guardrail(rng, length=20.0):
    post = _box_sides(rng, 30000, length, -0.05, 0.05, 0.30, 0.75, top_bottom=False)
    rail = _box_sides(rng, 20000, length, -0.20, 0.20, 0.75, 0.85)
    return np.vstack([post, rail])


def _arc_guardrail(rng, radius=30.0):
    """The T guardrail bent along a quarter circle, starting at the origin heading +X."""
    length = radius * math.pi / 2
    post = _box_sides(rng, 45000, length, -0.05, 0.05, 0.30, 0.75, top_bottom=False)
    rail = _box_sides(rng, 30000, length, -0.20, 0.20, 0.75, 0.85)
    local = np.vstack([post, rail])
    phi = local[:, 0] / radius
    r = radius - local[:, 1]
    return np.column_stack([r * np.sin(phi), radius - r * np.cos(phi), local[:, 2]])


def _assert_transforms_reproduce_straight(found):
    for side, straight in ((found.segment.front, found.straight.front), (found.segment.back, found.straight.back)):
        for poly, flat, b in zip(side, straight, found.piece_blocks):
            t = found.transforms[b]
            for ring, want in zip(poly.rings(), flat.rings()):
                assert np.allclose(t.forward(ring), want, rtol=0.0, atol=1e-9)


# ==== plane-like ====

def test_flat_patch_becomes_grid_of_cells(patch):
    polys = extract_plane_like(patch, CFG)
    assert len(polys) >= 140
    z = np.concatenate([p.shell_array()[:, 2] for p in polys])
    assert np.all(np.abs(z - 0.5) <= 3 * 0.005)
    area = sum(Polygon(p.shell_array()[:, :2], [h[:, :2] for h in p.rings()[1:]]).area for p in polys)
    assert area == pytest.approx(140.0, rel=0.02)


def test_lane_dash_is_one_polygon(rng):
    dash = plane_patch(rng, length=3.0, width=0.15, z=0.0, density=2000, semantic=Semantic.RoadLane)
    polys = extract_plane_like(dash, CFG)
    assert len(polys) == 1
    assert Polygon(polys[0].shell_array()[:, :2]).area == pytest.approx(0.45, rel=0.2)


def test_plane_like_rejects_other_semantics(rng):
    with pytest.raises(InvalidInstanceError):
        extract_plane_like(cloud_of(cylinder(rng, n=100), Semantic.Guardrail), CFG)


# ==== guardrail ====

def test_block_transform_round_trip(rng):
    t = BlockTransform(0.7, (1.0, 2.0), (3.0, -1.0, 0.0), 0.0, 5.0)
    pts = rng.uniform(-5, 5, (20, 3))
    assert np.allclose(t.inverse(t.forward(pts)), pts)
    assert np.allclose(t.forward(pts)[:, 2], pts[:, 2])


def test_straighten_lays_band_along_x(rng):
    band = affinity.rotate(box(0, -0.2, 10, 0.2), 45.0, origin=(0, 0))
    mid = affinity.rotate(LineString([(0, 0), (10, 0)]), 45.0, origin=(0, 0))
    local = np.column_stack([rng.uniform(0, 10, 2000), rng.uniform(-0.2, 0.2, 2000), rng.uniform(0, 1, 2000)])
    c = math.cos(math.pi / 4)
    pts = local.copy()
    pts[:, 0] = c * local[:, 0] - c * local[:, 1]
    pts[:, 1] = c * local[:, 0] + c * local[:, 1]
    flat, transforms = straighten(pts, band, mid, 1.0)
    assert len(flat) == 2000
    assert len(transforms) == 11
    assert np.all(np.abs(flat[:, 1]) <= 0.2 + 1e-6)
    assert flat[:, 0].min() >= -1e-6 and flat[:, 0].max() <= 10.0 + 1e-6
    assert [t.arc_start for t in transforms] == sorted(t.arc_start for t in transforms)


def test_t_section_guardrail(rng):
    pts = _t_guardrail(rng)
    found = extract_guardrail(cloud_of(pts, Semantic.Guardrail), CFG)
    assert len(found) == 1
    seg = found[0].segment
    assert seg.mismatch() is None
    assert len(found[0].transforms) >= 15
    assert list(found[0].piece_blocks) == sorted(found[0].piece_blocks)
    _assert_transforms_reproduce_straight(found[0])

    front = np.vstack([p.shell_array() for p in seg.front])
    back = np.vstack([p.shell_array() for p in seg.back])
    lo, hi = pts.min(axis=0) - 0.1, pts.max(axis=0) + 0.1
    assert np.all((front >= lo) & (front <= hi))
    assert np.all((back >= lo) & (back <= hi))
    # along the bottom edge only the post is in reach, so the pair spans its thickness
    post = front[:, 2] < 0.45
    assert post.sum() > 10
    assert np.mean(np.abs(front[post, 1] - back[post, 1])) == pytest.approx(0.1, abs=0.03)


def test_quarter_arc_guardrail(rng):
    found = extract_guardrail(cloud_of(_arc_guardrail(rng), Semantic.Guardrail), CFG)
    assert len(found) == 1
    _assert_transforms_reproduce_straight(found[0])
    assert found[0].segment.mismatch() is None
    thetas = np.array([t.theta for t in found[0].transforms])
    # cap blocks take a single segment's direction, the inner ones turn steadily with the arc
    assert np.all(np.diff(thetas[1:-1]) > 0)
    assert thetas[-2] - thetas[1] == pytest.approx(math.pi / 2, abs=0.1)
    front = np.vstack([p.shell_array() for p in found[0].segment.front])
    assert np.hypot(front[:, 0], front[:, 1] - 30.0) == pytest.approx(np.full(len(front), 30.0), abs=0.3)


def test_guardrail_without_centerline(rng):
    blob = rng.uniform(0.0, 0.1, (10, 3))
    with pytest.raises(NoCenterlineError):
        extract_guardrail(cloud_of(blob, Semantic.Guardrail), CFG)


# ==== pole-like parts ====

def test_pole_rings(rng):
    rings = extract_pole(cloud_of(cylinder(rng), Semantic.RoadSign, Part.Pole), CFG)
    assert len(rings) == 30
    assert all(r.signature == (30, ()) for r in rings)
    assert all(_ring_radius(r) == pytest.approx(0.10, abs=0.01) for r in rings)
    heights = [r.shell_array()[0, 2] for r in rings]
    assert heights == sorted(heights)


def test_tapered_pole_narrows(rng):
    pts = cylinder(rng, radius=0.15, top_radius=0.05, n=8000)
    radii = [_ring_radius(r) for r in extract_pole(cloud_of(pts, Semantic.RoadLight, Part.Pole), CFG)]
    assert radii[0] > radii[-1] + 0.05
    assert np.all(np.diff(radii) < 0.01)


def test_sparse_slabs_are_skipped(rng):
    pts = np.vstack([cylinder(rng, height=1.0, n=2000), [[0.0, 0.0, 1.05], [0.01, 0.0, 1.06]]])
    idx, count = slab_index(pts[:, 2], CFG.dh)
    assert count == 11
    assert len(extract_pole(cloud_of(pts, Semantic.RoadSign, Part.Pole), CFG)) == 10
    with pytest.raises(EmptyPoleError):
        extract_pole(cloud_of(pts[:2], Semantic.RoadSign, Part.Pole), CFG)


def test_yawed_rectangular_panel(rng):
    pair = extract_panel(cloud_of(_panel(rng), Semantic.RoadSign, Part.Panel), CFG)
    assert pair.mismatch() is None
    front, back = pair.front[0].shell_array(), pair.back[0].shell_array()
    assert math.degrees(fit_line_angle(front[:, :2])) == pytest.approx(30.0, abs=1.0)
    gap = np.hypot(*(front[:, :2] - back[:, :2]).T)
    assert float(np.mean(gap)) == pytest.approx(0.02, abs=0.01)
    a = math.radians(30.0)
    u = front[:, 0] * math.cos(a) + front[:, 1] * math.sin(a)
    assert Polygon(np.column_stack([u, front[:, 2]])).area == pytest.approx(0.96, rel=0.05)


def test_round_panel_area(rng):
    pair = extract_panel(cloud_of(_panel(rng, yaw_deg=0.0, round_radius=0.45), Semantic.RoadSign, Part.Panel), CFG)
    face = pair.front[0].shell_array()
    assert Polygon(face[:, [0, 2]]).area == pytest.approx(math.pi * 0.45**2, rel=0.05)


def test_light_arm_rings(rng):
    rings = extract_light(cloud_of(_arm(rng), Semantic.RoadLight, Part.Light), CFG)
    assert 12 <= len(rings) <= 17
    assert all(r.signature == (30, ()) for r in rings)
    centers = np.array([r.shell_array().mean(axis=0) for r in rings])
    radii = [float(np.linalg.norm(r.shell_array() - c, axis=1).mean()) for r, c in zip(rings, centers)]
    assert all(rad == pytest.approx(0.06, abs=0.01) for rad in radii)
    # ring centres sit on one straight axis
    centered = centers - centers.mean(axis=0)
    _, _, vt = np.linalg.svd(centered)
    off_axis = centered - np.outer(centered @ vt[0], vt[0])
    assert np.linalg.norm(off_axis, axis=1).max() < 0.03


# ==== dispatch ====

def _sign(rng, panel_points=None):
    pole = cylinder(rng, radius=0.05, height=2.5, n=4000)
    panel = _panel(rng, n=4000, yaw_deg=90.0, z0=2.0) + [0.08, 0.0, 0.0] if panel_points is None else panel_points
    pts = np.vstack([pole, panel])
    part = np.array([Part.Pole] * len(pole) + [Part.Panel] * len(panel), dtype=np.uint8)
    return cloud_of(pts, Semantic.RoadSign, part)


def test_extract_instance_lane(rng):
    dash = plane_patch(rng, length=3.0, width=0.15, density=2000, semantic=Semantic.RoadLane)
    record = extract_instance(dash, CFG, ClusterConfig().parts, segment_id="s1", instance_id=4)
    assert record.kind is RecordKind.PlaneLike
    assert len(record.multipolygon) == 1
    assert record.record_id == "s1_RoadLane_4"


def test_extract_instance_sign(rng):
    record = extract_instance(_sign(rng), CFG, ClusterConfig().parts)
    assert record.kind is RecordKind.PoleLike
    assert len(record.poles) == 1
    assert len(record.panels) == 1
    assert record.lights == ()
    assert record.meta.warnings == ()


def test_failed_panel_becomes_warning(rng):
    flat_panel = np.column_stack([np.full(20, 0.5), np.zeros(20), np.linspace(2.0, 2.02, 20)])
    record = extract_instance(_sign(rng, flat_panel), CFG, ClusterConfig().parts)
    assert record.panels == ()
    assert len(record.meta.warnings) == 1
    assert record.meta.warnings[0].startswith("Panels: panel part 0")


def test_pole_like_without_usable_pole(rng):
    pts = np.vstack([[[0.0, 0.0, 0.0], [0.0, 0.0, 1.0]], _panel(rng, n=2000)])
    part = np.array([Part.Pole] * 2 + [Part.Panel] * 2000, dtype=np.uint8)
    with pytest.raises(InvalidInstanceError):
        extract_instance(cloud_of(pts, Semantic.RoadSign, part), CFG, ClusterConfig().parts)
