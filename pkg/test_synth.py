import json

import numpy as np
import pydantic
import pytest

from errors import SceneSpecError
from ingest.contract import Part, Semantic
from ingest.loader import load_cloud
from metrics import evaluate
from synth import GuardrailSpec, LightSpec, SceneSpec, SignSpec, generate, validate_scene, write_scene


def _small(**overrides):
    """20 m single carriageway with one of each pole-like asset and a guardrail."""
    params = dict(
        length=20.0,
        carriageways=1,
        density=40.0,
        pole_density=800.0,
        signs=[SignSpec(station=5.0, offset=-5.65)],
        lights=[LightSpec(station=15.0, offset=5.65)],
        guardrails=[GuardrailSpec(start=2.0, end=18.0, offset=4.45)],
        seed=7,
    )
    params.update(overrides)
    return SceneSpec(**params)


def test_same_seed_same_scene():
    a, b = generate(_small()), generate(_small())
    assert a.cloud.same_as(b.cloud)
    assert not a.cloud.same_as(generate(_small(seed=8)).cloud)


def test_written_scene_is_byte_identical(tmp_path):
    scene = generate(_small())
    one = write_scene(scene, tmp_path / "one").parent
    two = write_scene(generate(_small()), tmp_path / "two").parent
    names = sorted(p.name for p in one.iterdir())
    assert names == sorted(p.name for p in two.iterdir())
    assert "manifest.json" in names
    for name in names:
        assert (one / name).read_bytes() == (two / name).read_bytes(), name

    back = load_cloud(one / "scene.ply")
    assert len(back) == len(scene.cloud)
    assert json.loads((one / "manifest.json").read_text())["instances"] == len(scene.instances)


def test_preset_census():
    scene = generate(SceneSpec.preset(3, density=5.0, pole_density=400.0))
    counts = scene.census.set_index("asset")["count"].to_dict()
    assert counts == {
        "RoadSurface": 2,
        "RoadSide": 3,
        "RoadLane": 50,
        "RoadSign": 3,
        "RoadLight": 2,
        "Guardrail": 2,
    }
    assert scene.census.set_index("asset").loc["Guardrail", "mean_length"] == pytest.approx(50.0, abs=1.0)


def test_labels_and_instance_names():
    scene = generate(_small())
    names = [name for name, _, _ in scene.instances]
    assert names[:2] == ["RoadSurface_0", "RoadSide_0"]
    assert set(scene.ground_truth) == set(names)
    assert scene.ground_truth["RoadSign_0"][1].name == "RoadSign_0/Panel"

    cloud = scene.cloud
    signs = cloud.semantic == int(Semantic.RoadSign)
    assert set(np.unique(cloud.part[signs])) == {int(Part.Pole), int(Part.Panel)}
    lights = cloud.semantic == int(Semantic.RoadLight)
    assert set(np.unique(cloud.part[lights])) == {int(Part.Pole), int(Part.Light)}


def test_hash_section_has_posts_down_to_the_ground():
    def lowest(section):
        scene = generate(_small(sigma=0.0, guardrails=[GuardrailSpec(start=2.0, end=18.0, offset=4.45, section=section)]))
        rail = scene.cloud.points[scene.cloud.semantic == int(Semantic.Guardrail)]
        ground = 0.1 * (4.45 - 3.65)
        return rail[:, 2].min() - ground

    assert lowest("T") == pytest.approx(0.30, abs=0.01)
    assert lowest("#") == pytest.approx(0.0, abs=0.01)


def test_noise_free_points_lie_on_ground_truth():
    scene = generate(_small(sigma=0.0))
    report = evaluate(scene.instances, scene.ground_truth)
    assert report.excluded == []
    assert report.overall.avg < 1e-3


def test_noisy_points_stay_near_ground_truth():
    sigma = 0.005
    scene = generate(_small(sigma=sigma))
    report = evaluate(scene.instances, scene.ground_truth)
    assert report.overall.avg < 4 * sigma
    assert report.assets["RoadSurface"].avg == pytest.approx(sigma * np.sqrt(2 / np.pi), rel=0.25)


@pytest.mark.parametrize("overrides, message", [
    (dict(dash_width=8.0), "dash width"),
    (dict(curvature=0.2), "folds"),
    (dict(signs=[SignSpec(station=5.0, offset=0.0)]), "not on a road side"),
    (dict(signs=[SignSpec(station=25.0, offset=-5.65)]), "beyond road length"),
    (dict(signs=[SignSpec(station=5.0, offset=-5.65), SignSpec(station=5.5, offset=-5.65)]), "closer than"),
    (dict(guardrails=[GuardrailSpec(start=10.0, end=5.0, offset=4.45)]), "guardrail 0"),
    (dict(guardrails=[GuardrailSpec(start=2.0, end=18.0, offset=3.0)]), "onto the carriageway"),
    (dict(guardrails=[GuardrailSpec(start=10.0, end=18.0, offset=5.65)]), "overlaps light 0"),
])
def test_bad_scenes_are_rejected(overrides, message):
    with pytest.raises(SceneSpecError, match=message):
        validate_scene(_small(**overrides))


def test_unknown_scene_keys_are_rejected():
    with pytest.raises(pydantic.ValidationError):
        SceneSpec(lenght=20.0)
