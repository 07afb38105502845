import numpy as np
import pytest

from ingest.contract import LabeledCloud, NO_PART, Semantic


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end runs on full synthetic scenes")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def plane_patch(rng, length=20.0, width=7.0, z=0.5, density=400.0, sigma=0.005, semantic=Semantic.RoadSurface):
    """Noisy flat rectangle [0, length] x [0, width] at height z."""
    n = int(density * length * width)
    pts = np.column_stack([
        rng.uniform(0.0, length, n),
        rng.uniform(0.0, width, n),
        np.full(n, z) + rng.normal(0.0, sigma, n),
    ])
    return LabeledCloud.from_arrays(pts, int(semantic))


def cylinder(rng, radius=0.1, height=3.0, n=6000, sigma=0.002, center=(0.0, 0.0), z0=0.0, top_radius=None):
    """Lateral surface of a vertical (optionally tapered) cylinder."""
    top = radius if top_radius is None else top_radius
    h = rng.uniform(0.0, height, n)
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    r = radius + (top - radius) * h / height
    return np.column_stack([
        center[0] + r * np.cos(phi) + rng.normal(0.0, sigma, n),
        center[1] + r * np.sin(phi) + rng.normal(0.0, sigma, n),
        z0 + h,
    ])


def cloud_of(points, semantic, part=None):
    part = NO_PART if part is None else part
    return LabeledCloud.from_arrays(points, int(semantic), part)


@pytest.fixture
def patch(rng):
    return plane_patch(rng)
