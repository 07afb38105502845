import itertools
import math

import numpy as np
import pytest
from shapely import affinity
from shapely.geometry import LineString, Point, Polygon, box

from errors import DegenerateFitError, DegenerateInputError, FragmentationError, InvalidCenterlineError
from geom2d import (
    Circle2D,
    alphashape,
    chaikin,
    extract_centerlines,
    fit_line_angle,
    grid_partition,
    intersect,
    min_enclosing_circle,
    ray_sample_polygon,
    resample_polyline,
    rotate_plane,
    rotate_z,
    split_polygon_by_centerline,
)


# ==== alpha shapes ====

def _annulus_grid(r_in=2.0, r_out=5.0, step=0.05):
    g = np.arange(-r_out, r_out + step / 2, step)
    xx, yy = np.meshgrid(g, g)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    r = np.hypot(pts[:, 0], pts[:, 1])
    return pts[(r >= r_in) & (r <= r_out)]


def test_alphashape_unit_square_corners():
    polys = alphashape([(0, 0), (1, 0), (1, 1), (0, 1)], 0.1)
    assert len(polys) == 1
    assert polys[0].area == pytest.approx(1.0)
    assert len(polys[0].interiors) == 0
    assert polys[0].exterior.is_ccw


def test_alphashape_resolves_hole_at_fine_alpha():
    pts = _annulus_grid()
    fine = alphashape(pts, 10.0, strict=False)
    assert len(fine[0].interiors) >= 1
    assert fine[0].area == pytest.approx(math.pi * 21.0, rel=0.05)

    coarse = alphashape(pts, 0.1)
    assert len(coarse) == 1
    assert len(coarse[0].interiors) == 0


def test_alphashape_largest_first():
    a = np.array([[x, y] for x in np.arange(0, 4.01, 0.2) for y in np.arange(0, 2.01, 0.2)])
    b = np.array([[x, y] for x in np.arange(10, 11.01, 0.2) for y in np.arange(0, 1.01, 0.2)])
    polys = alphashape(np.vstack([b, a]), 2.0)
    assert len(polys) == 2
    assert polys[0].area == pytest.approx(8.0)
    assert polys[1].area == pytest.approx(1.0)


def test_alphashape_errors():
    with pytest.raises(DegenerateInputError):
        alphashape([(0, 0), (1, 1)], 1.0)
    with pytest.raises(DegenerateInputError):
        alphashape([(0, 0), (1, 1), (2, 2), (3, 3)], 1.0)
    with pytest.raises(DegenerateInputError):
        alphashape([(0, 0), (1, 0), (0, 1)], 0.0)
    grid = np.array([[x, y] for x in np.arange(0, 2.01, 0.1) for y in np.arange(0, 2.01, 0.1)])
    with pytest.raises(FragmentationError) as info:
        alphashape(np.vstack([grid, [[50.0, 50.0]]]), 1.0)
    assert info.value.largest is not None
    assert info.value.largest.area == pytest.approx(4.0)


# ==== centerlines ====

def test_centerline_of_long_rectangle():
    lines = extract_centerlines(box(0, 0, 10, 1), 1.0)
    assert len(lines) == 1
    midline = LineString([(0.5, 0.5), (9.5, 0.5)])
    assert lines[0].hausdorff_distance(midline) < 0.25
    # oriented so the first vertex is the lexicographically smaller end
    assert lines[0].coords[0][0] < lines[0].coords[-1][0]


def test_centerline_of_round_polygon_is_short():
    circle = Point(0, 0).buffer(2.0, quad_segs=16)
    lines = extract_centerlines(circle, 1.0)
    assert sum(line.length for line in lines) < 4.0


def test_centerline_longest_mode_returns_at_most_one():
    el = Polygon([(0, 0), (10, 0), (10, 1), (1, 1), (1, 8), (0, 8)])
    lines = extract_centerlines(el, 1.0, mode="longest")
    assert len(lines) == 1
    # one path through the corner covers both arms
    assert lines[0].length == pytest.approx(9.0 + 7.0, rel=0.15)


def test_centerline_rejects_unknown_mode():
    with pytest.raises(ValueError):
        extract_centerlines(box(0, 0, 10, 1), 1.0, mode="skeleton")


# ==== polylines ====

def test_resample_integer_spacing():
    out = resample_polyline(LineString([(0, 0), (10, 0)]), 1.0)
    assert np.allclose(np.asarray(out.coords)[:, 0], np.arange(11))


def test_resample_spacing_longer_than_line():
    out = resample_polyline(LineString([(0, 0), (1, 0)]), 5.0)
    assert list(out.coords) == [(0.0, 0.0), (1.0, 0.0)]


def test_resample_keeps_arc_length_gaps(rng):
    x = np.cumsum(rng.uniform(0.05, 0.5, 50))
    line = LineString(np.column_stack([x, rng.uniform(-1.0, 1.0, 50)]))
    out = np.asarray(resample_polyline(line, 0.25).coords)
    along = np.array([line.project(Point(p)) for p in out])
    assert max(line.distance(Point(p)) for p in out) < 1e-9
    assert np.allclose(np.diff(along)[:-1], 0.25, atol=1e-9)
    assert np.diff(along)[-1] <= 0.25 + 1e-9


def test_chaikin_open_keeps_endpoints():
    out = chaikin(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]), 1)
    assert np.allclose(out, [[0, 0], [0.25, 0], [0.75, 0], [1, 0.25], [1, 0.75], [1, 1]])
    ring = chaikin(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), 2, closed=True)
    assert len(ring) == 16


# ==== split & grid ====

def test_split_rectangle_every_meter():
    rect = box(0, 0, 10, 1)
    pieces = split_polygon_by_centerline(rect, LineString([(0, 0.5), (10, 0.5)]), 1.0)
    assert len(pieces) == 11
    assert sum(p.polygon.area for p in pieces) == pytest.approx(10.0, abs=1e-6)
    assert [p.segment for p in pieces] == list(range(11))
    assert all(p.theta == pytest.approx(0.0) for p in pieces)
    cuts = [0.0, *np.arange(0.5, 10.0, 1.0), 10.0]
    for p, lo, hi in zip(pieces, cuts[:-1], cuts[1:]):
        minx, _, maxx, _ = p.polygon.bounds
        assert minx == pytest.approx(lo, abs=1e-5)
        assert maxx == pytest.approx(hi, abs=1e-5)


def test_split_two_segments_gives_three_blocks():
    pieces = split_polygon_by_centerline(box(0, 0, 10, 1), LineString([(0, 0.5), (10, 0.5)]), 5.0)
    assert [p.segment for p in pieces] == [0, 1, 2]
    assert [p.polygon.area for p in pieces] == pytest.approx([2.5, 5.0, 2.5], abs=1e-5)


def test_split_without_interior_vertex_returns_input():
    rect = box(0, 0, 10, 1)
    pieces = split_polygon_by_centerline(rect, LineString([(0, 0.5), (10, 0.5)]), 20.0)
    assert len(pieces) == 1
    assert pieces[0].polygon.equals(rect)


def test_split_curved_band_angles_follow_the_arc():
    phi = np.linspace(0.0, math.pi / 2, 60)
    outer = np.column_stack([6 * np.cos(phi), 6 * np.sin(phi)])
    inner = np.column_stack([4 * np.cos(phi), 4 * np.sin(phi)])[::-1]
    band = Polygon(np.vstack([outer, inner]))
    arc = LineString(np.column_stack([5 * np.cos(phi), 5 * np.sin(phi)]))
    pieces = split_polygon_by_centerline(band, arc, 1.0)
    thetas = [p.theta for p in pieces]
    assert len(pieces) >= 7
    assert thetas == sorted(thetas)
    assert sum(p.polygon.area for p in pieces) == pytest.approx(band.area, rel=1e-6)


def test_split_rejects_centerline_outside():
    with pytest.raises(InvalidCenterlineError):
        split_polygon_by_centerline(box(0, 0, 10, 1), LineString([(0, 5), (10, 5)]), 1.0)


@pytest.mark.parametrize("grid, expected", [(1.0, 20), (2.0, 5)])
def test_grid_partition_axis_aligned(grid, expected):
    cells = grid_partition(box(0, 0, 10, 2), 0.0, (5.0, 1.0), grid, grid)
    assert len(cells) == expected
    assert sum(c.area for c in cells) == pytest.approx(20.0)


def test_grid_partition_rotated_round_trip():
    rect = affinity.rotate(box(0, 0, 10, 2), 45.0, origin=(0, 0))
    cells = grid_partition(rect, math.pi / 4, (0.0, 0.0), 1.0, 1.0)
    assert len(cells) == 20
    assert sum(c.intersection(rect).area for c in cells) == pytest.approx(20.0, rel=1e-9)


def test_grid_partition_clip_and_errors():
    tri = Polygon([(0, 0), (4, 0), (0, 4)])
    clipped = grid_partition(tri, 0.0, (0.0, 0.0), 1.0, 1.0, clip=True)
    assert sum(c.area for c in clipped) == pytest.approx(8.0)
    with pytest.raises(DegenerateInputError):
        grid_partition(Polygon(), 0.0, (0.0, 0.0), 1.0, 1.0)
    with pytest.raises(ValueError):
        grid_partition(tri, 0.0, (0.0, 0.0), 0.0, 1.0)


def test_intersect():
    sq = box(0, 0, 1, 1)
    assert intersect(sq, sq)[0].area == pytest.approx(1.0)
    assert intersect(sq, box(2, 0, 3, 1)) == []
    holed = Polygon(sq.exterior.coords, [box(0.25, 0.25, 0.75, 0.75).exterior.coords])
    assert sum(p.area for p in intersect(holed, sq)) == pytest.approx(0.75, abs=1e-9)


# ==== enclosing circle & rays ====

def _brute_circle(pts):
    pairs = np.array(list(itertools.combinations(range(len(pts)), 2)))
    centers = [(pts[pairs[:, 0]] + pts[pairs[:, 1]]) / 2]
    triples = np.array(list(itertools.combinations(range(len(pts)), 3)), dtype=int).reshape(-1, 3)
    a, b, c = pts[triples[:, 0]], pts[triples[:, 1]], pts[triples[:, 2]]
    d = 2 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
    ok = np.abs(d) > 1e-12
    a, b, c, d = a[ok], b[ok], c[ok], d[ok]
    aa, bb, cc = (a * a).sum(1), (b * b).sum(1), (c * c).sum(1)
    ux = (aa * (b[:, 1] - c[:, 1]) + bb * (c[:, 1] - a[:, 1]) + cc * (a[:, 1] - b[:, 1])) / d
    uy = (aa * (c[:, 0] - b[:, 0]) + bb * (a[:, 0] - c[:, 0]) + cc * (b[:, 0] - a[:, 0])) / d
    centers.append(np.column_stack([ux, uy]))
    centers = np.vstack(centers)
    dist = np.linalg.norm(pts[None, :, :] - centers[:, None, :], axis=2)
    radii = dist.max(axis=1)
    best = int(np.argmin(radii))
    return centers[best], radii[best]


def test_min_enclosing_circle_small_cases():
    c = min_enclosing_circle([(0, 0), (2, 0)])
    assert c.center == pytest.approx((1.0, 0.0))
    assert c.radius == pytest.approx(1.0)
    tri = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]
    assert min_enclosing_circle(tri).radius == pytest.approx(1 / math.sqrt(3))
    with pytest.raises(DegenerateInputError):
        min_enclosing_circle(np.zeros((0, 2)))


@pytest.mark.parametrize("seed", range(1000))
def test_min_enclosing_circle_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-3.0, 3.0, (int(rng.integers(1, 51)), 2))
    got = min_enclosing_circle(pts)
    if len(pts) == 1:
        assert got.radius == 0.0
        assert np.allclose(got.center, pts[0])
        return
    center, radius = _brute_circle(pts)
    assert got.radius == pytest.approx(radius, abs=1e-9)
    assert np.allclose(got.center, center, atol=1e-7)
    assert np.all(np.hypot(*(pts - got.center).T) <= got.radius + 1e-9)


def test_ray_sample_circle_and_square():
    out = ray_sample_polygon(Circle2D((0.0, 0.0), 1.0), 4)
    assert np.allclose(out, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-12)
    out = ray_sample_polygon(box(-0.5, -0.5, 0.5, 0.5), 4)
    assert np.allclose(out, [[0.5, 0], [0, 0.5], [-0.5, 0], [0, -0.5]], atol=1e-9)
    with pytest.raises(ValueError):
        ray_sample_polygon(box(0, 0, 1, 1), 2)


def test_ray_sample_lands_on_boundary(rng):
    hull = Polygon(rng.uniform(-1.0, 1.0, (40, 2))).convex_hull
    out = ray_sample_polygon(hull, 30)
    assert out.shape == (30, 2)
    assert max(hull.boundary.distance(Point(p)) for p in out) < 1e-9


# ==== fitting & rotation ====

def test_fit_line_angle():
    t = np.linspace(0.0, 2.0, 20)
    assert fit_line_angle(np.column_stack([t, t])) == pytest.approx(math.pi / 4)
    assert fit_line_angle(np.column_stack([np.full(20, 3.0), t])) == pytest.approx(math.pi / 2)


def test_fit_line_angle_noisy(rng):
    t = np.linspace(-1.0, 1.0, 400)
    a = math.radians(30.0)
    pts = np.column_stack([t * math.cos(a), t * math.sin(a)]) + rng.normal(0.0, 0.01, (400, 2))
    assert math.degrees(fit_line_angle(pts)) == pytest.approx(30.0, abs=1.0)
    with pytest.raises(DegenerateFitError):
        fit_line_angle(np.ones((5, 2)))


def test_fit_line_angle_rejects_isotropic_spread():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(DegenerateFitError, match="no dominant direction"):
        fit_line_angle(square)
    with pytest.raises(DegenerateFitError):
        fit_line_angle([[1.0, 2.0]])


def test_rotations():
    assert np.allclose(rotate_z([[1.0, 0.0, 5.0]], math.pi / 2, (0.0, 0.0)), [[0.0, 1.0, 5.0]])
    assert np.allclose(rotate_z([[2.0, 1.0, 0.0]], math.pi, (1.0, 1.0)), [[0.0, 1.0, 0.0]])
    back = rotate_plane(rotate_plane([[1.0, 2.0, 3.0]], 0.3, (0, 0, 0)), -0.3, (0, 0, 0))
    assert np.allclose(back, [[1.0, 2.0, 3.0]])
    assert np.allclose(rotate_plane([[1.0, 7.0, 0.0]], math.pi / 2, (0, 0, 0)), [[0.0, 7.0, 1.0]])
