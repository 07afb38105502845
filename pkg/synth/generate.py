from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from cluster.census import census
from errors import SceneSpecError
from geostore.store import write_manifest
from ingest.contract import LabeledCloud, NO_PART, Part, Semantic
from ingest.loader import save_cloud
from mesh import Mesh, export
from .contract import GuardrailSpec, LightSpec, SceneSpec, SignSpec
from .scene import (
    RoadFrame,
    cylinder_mesh,
    path_box_mesh,
    plate_mesh,
    sample_box,
    sample_cylinder,
    sample_disc_plate,
    sample_path_boxes,
    sample_strip,
    strip_mesh,
)

logger = logging.getLogger(__name__)

MIN_POLE_GAP = 1.0      # m between pole bases
PANEL_GAP = 0.01        # m between pole surface and panel back

# cross-sections in (y0, y1, z0, z1), y across the road, z above ground
T_SECTION = [(-0.05, 0.05, 0.30, 0.75), (-0.20, 0.20, 0.75, 0.85)]
HASH_RAILS = [(-0.10, 0.10, 0.35, 0.45), (-0.10, 0.10, 0.70, 0.80)]
HASH_POST = (-0.075, 0.075, 0.0, 0.80)
HASH_POST_WIDTH = 0.10


@dataclass(eq=False)
class Asset:
    """One generated instance: its points, part codes and ground-truth meshes."""
    semantic: Semantic
    points: np.ndarray
    part: np.ndarray | None = None
    meshes: list[Mesh] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class Scene:
    cloud: LabeledCloud
    ground_truth: dict[str, list[Mesh]]     # instance name -> meshes
    census: pd.DataFrame
    instances: list[tuple[str, Semantic, np.ndarray]]
    spec: SceneSpec

    def __iter__(self):
        return iter((self.cloud, self.ground_truth, self.census))


# =============================================================================
# Placement checks
# =============================================================================

def guardrail_boxes(g: GuardrailSpec) -> list[tuple[float, ...]]:
    if g.section == "T":
        return [(g.start, g.end, *sec) for sec in T_SECTION]
    boxes = [(g.start, g.end, *rail) for rail in HASH_RAILS]
    half = HASH_POST_WIDTH / 2
    for sp in np.arange(g.start + half, g.end - half + 1e-9, g.post_spacing):
        boxes.append((sp - half, sp + half, *HASH_POST))
    return boxes


def _half_width(g: GuardrailSpec) -> float:
    return max(abs(b[y]) for b in guardrail_boxes(g) for y in (2, 3))


def _on_side(spec: SceneSpec, t0: float, t1: float) -> bool:
    return any(lo <= t0 and t1 <= hi for lo, hi in spec.side_spans)


def validate_scene(spec: SceneSpec) -> None:
    """Raise SceneSpecError for placements that cannot be built or would overlap."""
    if spec.dash_width >= spec.surface_width:
        raise SceneSpecError(f"dash width {spec.dash_width} m does not fit a {spec.surface_width} m carriageway")
    if abs(spec.curvature) * spec.half_extent >= 1.0:
        raise SceneSpecError(f"curvature {spec.curvature}/m folds the cross-section (half width {spec.half_extent} m)")

    poles: list[tuple[str, float, float, float]] = []
    for kind, items in (("sign", spec.signs), ("light", spec.lights)):
        for i, p in enumerate(items):
            r = p.pole_radius if isinstance(p, SignSpec) else p.base_radius
            if p.station > spec.length:
                raise SceneSpecError(f"{kind} {i}: station {p.station} m beyond road length {spec.length} m")
            if not _on_side(spec, p.offset - r, p.offset + r):
                raise SceneSpecError(f"{kind} {i}: pole at offset {p.offset} m is not on a road side")
            poles.append((f"{kind} {i}", p.station, p.offset, r))

    for a in range(len(poles)):
        for b in range(a + 1, len(poles)):
            na, sa, ta, _ = poles[a]
            nb, sb, tb, _ = poles[b]
            if np.hypot(sa - sb, ta - tb) < MIN_POLE_GAP:
                raise SceneSpecError(f"{na} and {nb} are closer than {MIN_POLE_GAP} m")

    for i, g in enumerate(spec.guardrails):
        if g.start >= g.end or g.end > spec.length:
            raise SceneSpecError(f"guardrail {i}: stations [{g.start}, {g.end}] outside (0, {spec.length}]")
        hw = _half_width(g)
        if not _on_side(spec, g.offset - hw, g.offset + hw):
            raise SceneSpecError(f"guardrail {i}: offset {g.offset} m reaches onto the carriageway")
        for name, s, t, r in poles:
            if g.start - r <= s <= g.end + r and abs(t - g.offset) < hw + r + 0.2:
                raise SceneSpecError(f"guardrail {i} overlaps {name}")


# =============================================================================
# Assets
# =============================================================================

def _noisy(points: np.ndarray, sigma: float, rng) -> np.ndarray:
    if sigma <= 0 or len(points) == 0:
        return points
    return points + rng.normal(0.0, sigma, points.shape)


def road_assets(spec: SceneSpec, frame: RoadFrame, rngs) -> list[Asset]:
    """Carriageways (with lane dashes cut out) then road sides."""
    assets: list[Asset] = []
    dashes: list[Asset] = []
    period = spec.dash_length + spec.dash_gap
    rngs = iter(rngs)
    for lo, hi in spec.carriageway_spans:
        rng = next(rngs)
        pts, s, t = sample_strip(frame, 0.0, spec.length, lo, hi, spec.density, rng)
        lane = np.zeros(len(pts), dtype=bool)
        if spec.dash_length > 0:
            tc = 0.5 * (lo + hi)
            across = np.abs(t - tc) <= spec.dash_width / 2
            starts = np.arange(spec.dash_gap / 2, spec.length - spec.dash_length + 1e-9, period)
            for s0 in starts:
                hit = across & (s >= s0) & (s <= s0 + spec.dash_length)
                lane |= hit
                mesh = strip_mesh(frame, s0, s0 + spec.dash_length, tc - spec.dash_width / 2, tc + spec.dash_width / 2)
                dashes.append(Asset(Semantic.RoadLane, _noisy(pts[hit], spec.sigma, rng), meshes=[mesh]))
        surface = strip_mesh(frame, 0.0, spec.length, lo, hi)
        assets.append(Asset(Semantic.RoadSurface, _noisy(pts[~lane], spec.sigma, rng), meshes=[surface]))
    for lo, hi in spec.side_spans:
        rng = next(rngs)
        pts, _, _ = sample_strip(frame, 0.0, spec.length, lo, hi, spec.density, rng)
        assets.append(Asset(Semantic.RoadSide, _noisy(pts, spec.sigma, rng), meshes=[strip_mesh(frame, 0.0, spec.length, lo, hi)]))
    return assets + dashes


def _pole_sigma(spec: SceneSpec) -> float:
    return spec.sigma if spec.pole_sigma is None else spec.pole_sigma


def sign_asset(spec: SceneSpec, frame: RoadFrame, sign: SignSpec, rng) -> Asset:
    base = frame.world(sign.station, sign.offset)[0]
    up = np.array([0.0, 0.0, 1.0])
    pole = sample_cylinder(base, up, sign.height, sign.pole_radius, sign.pole_radius, spec.pole_density, rng)

    phi = float(frame.heading(sign.station)[()]) + np.radians(sign.yaw)
    u = np.array([np.cos(phi), np.sin(phi), 0.0])
    n = np.array([-np.sin(phi), np.cos(phi), 0.0])
    half_t = sign.panel_thickness / 2
    center = base + (sign.pole_radius + half_t + PANEL_GAP) * n + (sign.height - sign.panel_height / 2) * up
    axes = np.vstack([u, n, up])
    if sign.panel_shape == "rect":
        half = np.array([sign.panel_width / 2, half_t, sign.panel_height / 2])
        panel = sample_box(center, axes, half, spec.pole_density, rng)
        outline = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]]) * half[[0, 2]]
    else:
        radius = sign.panel_width / 2
        panel = sample_disc_plate(center, axes, radius, half_t, spec.pole_density, rng)
        phis = np.linspace(0.0, 2.0 * np.pi, 48, endpoint=False)
        outline = radius * np.column_stack([np.cos(phis), np.sin(phis)])

    sigma = _pole_sigma(spec)
    return Asset(
        Semantic.RoadSign,
        _noisy(np.vstack([pole, panel]), sigma, rng),
        np.concatenate([np.full(len(pole), Part.Pole), np.full(len(panel), Part.Panel)]).astype(np.uint8),
        [
            cylinder_mesh(base, up, sign.height, sign.pole_radius, sign.pole_radius, "Pole"),
            plate_mesh(center, axes, outline, half_t, "Panel"),
        ],
    )


def light_asset(spec: SceneSpec, frame: RoadFrame, light: LightSpec, rng) -> Asset:
    base = frame.world(light.station, light.offset)[0]
    up = np.array([0.0, 0.0, 1.0])
    pole = sample_cylinder(base, up, light.height, light.base_radius, light.top_radius, spec.pole_density, rng)

    if light.arm_yaw is None:
        direction = -np.sign(light.offset or 1.0) * frame.normal(light.station)[0]
    else:
        phi = float(frame.heading(light.station)[()]) + np.radians(light.arm_yaw)
        direction = np.array([np.cos(phi), np.sin(phi)])
    direction = np.append(direction, 0.0)
    origin = base + (light.height - light.arm_radius) * up
    arm = sample_cylinder(
        origin, direction, light.arm_length, light.arm_radius, light.arm_radius, spec.pole_density, rng,
        start=light.top_radius,
    )

    sigma = _pole_sigma(spec)
    return Asset(
        Semantic.RoadLight,
        _noisy(np.vstack([pole, arm]), sigma, rng),
        np.concatenate([np.full(len(pole), Part.Pole), np.full(len(arm), Part.Light)]).astype(np.uint8),
        [
            cylinder_mesh(base, up, light.height, light.base_radius, light.top_radius, "Pole"),
            cylinder_mesh(origin, direction, light.arm_length, light.arm_radius, light.arm_radius, "Light", start=light.top_radius),
        ],
    )


def guardrail_asset(spec: SceneSpec, frame: RoadFrame, g: GuardrailSpec, rng) -> Asset:
    boxes = guardrail_boxes(g)
    pts = sample_path_boxes(frame, g.offset, boxes, spec.pole_density, rng)
    meshes = [path_box_mesh(frame, g.offset, box, f"Box_{i}") for i, box in enumerate(boxes)]
    return Asset(Semantic.Guardrail, _noisy(pts, _pole_sigma(spec), rng), meshes=meshes)


# =============================================================================
# Scene
# =============================================================================

def generate(spec: SceneSpec) -> Scene:
    """
    Sample a labeled scene with its ground truth. Every asset draws from its own child of
    SeedSequence(spec.seed), so the output depends only on the spec.
    """
    validate_scene(spec)
    frame = RoadFrame(spec)
    n_strips = len(spec.carriageway_spans) + len(spec.side_spans)
    streams = [np.random.default_rng(child) for child in np.random.SeedSequence(spec.seed).spawn(
        n_strips + len(spec.signs) + len(spec.lights) + len(spec.guardrails)
    )]

    assets = road_assets(spec, frame, streams[:n_strips])
    k = n_strips
    for sign in spec.signs:
        assets.append(sign_asset(spec, frame, sign, streams[k]))
        k += 1
    for light in spec.lights:
        assets.append(light_asset(spec, frame, light, streams[k]))
        k += 1
    for g in spec.guardrails:
        assets.append(guardrail_asset(spec, frame, g, streams[k]))
        k += 1

    assets.sort(key=lambda a: int(a.semantic))
    seen: dict[Semantic, int] = {}
    instances, ground_truth = [], {}
    for a in assets:
        idx = seen.get(a.semantic, 0)
        seen[a.semantic] = idx + 1
        name = f"{a.semantic.name}_{idx}"
        instances.append((name, a.semantic, a.points))
        ground_truth[name] = [m.renamed(f"{name}/{m.name}" if m.name else name) for m in a.meshes]

    points = np.vstack([a.points for a in assets]) if assets else np.zeros((0, 3))
    semantic = np.concatenate([np.full(len(a.points), int(a.semantic), dtype=np.uint8) for a in assets]) if assets else np.zeros(0, np.uint8)
    part = np.concatenate([
        a.part if a.part is not None else np.full(len(a.points), NO_PART, dtype=np.uint8) for a in assets
    ]) if assets else np.zeros(0, np.uint8)
    cloud = LabeledCloud(points, semantic, part)
    table = census([(sem, pts) for _, sem, pts in instances])
    logger.info("synthetic scene: %d points, %d instances, %.1f m", len(cloud), len(instances), spec.length)
    return Scene(cloud, ground_truth, table, instances, spec)


def write_scene(scene: Scene, out_dir: str | Path, cloud_format: str = "ply", mesh_format: str = "obj") -> Path:
    """Cloud, merged ground-truth mesh, census table and a manifest under `out_dir`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cloud_path = save_cloud(scene.cloud, out_dir / f"scene.{cloud_format}")
    meshes = [m for group in scene.ground_truth.values() for m in group]
    mesh_path = export(meshes, out_dir / f"ground_truth.{mesh_format}")
    scene.census.to_csv(out_dir / "census.csv", index=False)
    (out_dir / "census.json").write_text(scene.census.to_json(orient="records", indent=2), encoding="utf-8")
    (out_dir / "scene_spec.json").write_text(scene.spec.model_dump_json(indent=2), encoding="utf-8")
    entries = [{"file": p.name} for p in (cloud_path, mesh_path)]
    entries += [{"file": name} for name in ("census.csv", "census.json", "scene_spec.json")]
    return write_manifest(entries, out_dir, points=len(scene.cloud), instances=len(scene.instances), length_m=scene.spec.length)
