import numpy as np
import pytest
from shapely.geometry import Polygon, box

from errors import DegenerateInputError
from lift import LiftParams, Plane, ReferenceIndex, lift_polygon_v1, lift_polygon_v2, lift_v1, lift_v2

PARAMS = LiftParams()


def _slab(rng, n=4000, thickness=0.1, sigma=0.005):
    """Two faces of a vertical board in XZ, separated along Y."""
    face = rng.integers(0, 2, n)
    return np.column_stack([
        rng.uniform(0.0, 2.0, n),
        face * thickness + rng.normal(0.0, sigma, n),
        rng.uniform(0.0, 1.0, n),
    ])


def test_plane_axes():
    assert Plane.XY.axes == (0, 1) and Plane.XY.missing == 2
    assert Plane("XZ").missing == 1
    assert Plane.YZ.axes == (1, 2) and Plane.YZ.missing == 0


def test_v1_constant_field(rng):
    refs = np.column_stack([rng.uniform(-0.1, 0.1, (50, 2)), np.full(50, 5.0)])
    assert lift_v1((0.0, 0.0), refs, "XY", PARAMS) == pytest.approx([0.0, 0.0, 5.0])


def test_v1_falls_back_to_nearest():
    refs = np.array([[1.0, 0.0, 4.0], [-1.0, 0.0, 6.0], [5.0, 5.0, 100.0]])
    out = lift_v1((0.0, 0.0), refs, Plane.XY, LiftParams(k_nearest=2))
    assert out[2] == pytest.approx(5.0)


def test_v1_matches_linear_scan(rng):
    refs = np.column_stack([rng.uniform(0, 5, (3000, 2)), rng.normal(0, 1, 3000)])
    index = ReferenceIndex(refs, "XY")
    for uv in rng.uniform(0.5, 4.5, (50, 2)):
        d = np.hypot(*(refs[:, :2] - uv).T)
        want = np.sort(refs[d <= PARAMS.radius, 2]).mean()
        assert index.v1(uv, PARAMS)[2] == pytest.approx(want, abs=1e-12)


def test_v2_extremes_and_clamp():
    refs = np.array([[0.0, 0.0, 0.0], [0.01, 0.0, 0.0], [0.0, 0.01, 1.0], [0.01, 0.01, 1.0]])
    hi, lo = lift_v2((0.0, 0.0), refs, "XY", LiftParams(pair_k=1))
    assert hi[2] == 1.0 and lo[2] == 0.0
    hi, lo = lift_v2((0.0, 0.0), [[0.0, 0.0, 3.0]], "XY", PARAMS)
    assert hi[2] == lo[2] == 3.0


def test_v2_separates_slab_faces(rng):
    hi, lo = lift_v2((1.0, 0.5), _slab(rng), "XZ", PARAMS)
    assert hi[[0, 2]] == pytest.approx([1.0, 0.5])
    assert hi[1] - lo[1] == pytest.approx(0.1, abs=0.02)


def test_polygon_v1_on_flat_and_sloped_fields():
    g = np.arange(0.0, 3.01, 0.05)
    xx, yy = np.meshgrid(g, g)
    flat = np.column_stack([xx.ravel(), yy.ravel(), np.full(xx.size, 2.0)])
    square = box(1, 1, 2, 2)
    lifted = lift_polygon_v1(square, flat, "XY", PARAMS)
    assert lifted.signature == (4, ())
    assert np.allclose(lifted.shell_array()[:, 2], 2.0)

    sloped = flat.copy()
    sloped[:, 2] = sloped[:, 0]
    ring = lift_polygon_v1(square, sloped, "XY", PARAMS).shell_array()
    assert np.all(np.abs(ring[:, 2] - ring[:, 0]) <= PARAMS.radius)


def test_polygon_v1_keeps_holes():
    g = np.arange(0.0, 3.01, 0.05)
    xx, yy = np.meshgrid(g, g)
    refs = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)])
    holed = Polygon(box(0, 0, 3, 3).exterior.coords, [box(1, 1, 2, 2).exterior.coords])
    lifted = lift_polygon_v1(holed, refs, "XY", PARAMS)
    assert lifted.signature == (4, (4,))


def test_polygon_v2_front_above_back(rng):
    refs = ReferenceIndex(_slab(rng), "XZ")
    pair = lift_polygon_v2(box(0.2, 0.2, 1.8, 0.8), refs, "XZ", PARAMS)
    assert pair.front.signature == pair.back.signature
    front, back = pair.front.shell_array(), pair.back.shell_array()
    assert np.all(front[:, 1] >= back[:, 1])
    assert np.allclose(front[:, [0, 2]], back[:, [0, 2]])


def test_reference_index_rejects_empty():
    with pytest.raises(DegenerateInputError):
        ReferenceIndex(np.zeros((0, 3)), "XY")
