"""
Pipeline stages.

Each stage reads only the previous stage's folder under `out_dir` (located through its
manifest.json) and writes its own folder. Per-instance work runs on worker threads; results are
collected in input order and written sequentially, manifest last, so the thread count never
changes an output byte. Wall-clock seconds go to a separate timing.json per stage.
"""

from __future__ import annotations

import asyncio
import json
import logging
import shutil
import time
from collections import defaultdict
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError as PydanticValidationError
from scipy.spatial import cKDTree

from charts import (
    df_to_csv_bytes,
    plane_like_stats,
    render_distance_bars,
    render_sweep,
    render_timing_bars,
    sweep_rows_to_df,
    to_json_bytes,
)
from cluster.census import census, obb_length
from cluster.instances import split_instances, write_instances
from config import PipelineConfig, settings
from errors import DataError, InvariantError, MissingFileError, SceneSpecError, TwinError
from extract.instance import extract_instance
from geostore.store import read_manifest, read_record, size_report, write_manifest, write_record
from ingest.contract import LabeledCloud, PLANE_LIKE, Semantic
from ingest.loader import load_cloud
from ingest.preprocess import preprocess
from mesh import build_record_mesh, export, read_meshes
from metrics import evaluate as evaluate_distances
from metrics import timing as timing_report
from synth.contract import SceneSpec
from synth.generate import generate, write_scene

logger = logging.getLogger(__name__)

TIMING = "timing.json"
DEFAULT_GRID_SIZES = (2.0, 1.5, 1.0, 0.5)
PLANE_LIKE_NAMES = frozenset(s.name for s in PLANE_LIKE)


# =============================================================================
# Plumbing
# =============================================================================

@contextmanager
def tagged(stage: str):
    """Attach the stage name to library errors; anything unexpected becomes an InvariantError."""
    try:
        yield
    except TwinError as exc:
        if exc.stage is None:
            exc.stage = stage
        raise
    except Exception as exc:
        raise InvariantError(f"unexpected {type(exc).__name__}: {exc}", stage=stage) from exc


def map_ordered(fn, items, threads: int) -> list:
    """fn over items on up to `threads` worker threads; results keep the input order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    async def _run():
        gate = asyncio.Semaphore(threads)

        async def one(item):
            async with gate:
                return await asyncio.to_thread(fn, item)

        return await asyncio.gather(*(one(item) for item in items))

    return asyncio.run(_run())


def stage_dir(root: str | Path, stage: str) -> Path:
    return Path(root) / stage


def _fresh(path: Path) -> Path:
    if path.exists():
        shutil.rmtree(path)
    path.mkdir(parents=True)
    return path


def _write_timing(out: Path, **fields) -> None:
    (out / TIMING).write_bytes(to_json_bytes(fields))


def _read_timing(path: Path) -> dict:
    p = path / TIMING
    if not p.is_file():
        raise MissingFileError(f"timing not found: {p} (run the previous stage first)")
    return json.loads(p.read_text(encoding="utf-8"))


def _debug_dump(out: Path, cfg: PipelineConfig) -> None:
    if settings.DEBUG:
        (out / "config.resolved.json").write_text(cfg.model_dump_json(indent=2), encoding="utf-8")


def _per_asset(pairs) -> dict[str, float]:
    acc: dict[str, float] = defaultdict(float)
    for asset, seconds in pairs:
        acc[asset] += seconds
    return dict(acc)


# =============================================================================
# synth
# =============================================================================

def synth(cfg: PipelineConfig, spec_path: str | Path | None = None, *, seed: int = 0, cloud_format: str = "ply") -> Path:
    with tagged("synth"):
        if spec_path is None:
            spec = SceneSpec.preset(seed=seed)
        else:
            p = Path(spec_path)
            if not p.is_file():
                raise MissingFileError(f"scene spec not found: {p}")
            spec = _scene_spec(p)
        out = _fresh(stage_dir(cfg.out_dir, "synth"))
        scene = generate(spec)
        write_scene(scene, out, cloud_format=cloud_format, mesh_format=cfg.mesh_format)
        return out / f"scene.{cloud_format}"


def _scene_spec(path: Path) -> SceneSpec:
    try:
        return SceneSpec.model_validate_json(path.read_text(encoding="utf-8"))
    except PydanticValidationError as exc:
        problems = [f"{'.'.join(str(x) for x in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()]
        raise SceneSpecError(f"{path}: invalid scene spec\n  " + "\n  ".join(problems)) from None


# =============================================================================
# segment
# =============================================================================

def raw_assignment(raw: LabeledCloud, instances, per_semantic) -> list[tuple[Semantic, LabeledCloud]]:
    """
    Give every raw point to the instance of its nearest preprocessed point of the same semantic,
    if that point lies within the semantic's eps; instance order is kept.
    """
    by_sem = raw.by_semantic()
    owner_pts: dict[Semantic, list[np.ndarray]] = defaultdict(list)
    owner_ids: dict[Semantic, list[np.ndarray]] = defaultdict(list)
    for i, (semantic, cloud) in enumerate(instances):
        owner_pts[semantic].append(cloud.points)
        owner_ids[semantic].append(np.full(len(cloud), i))
    members: dict[int, np.ndarray] = {}
    for semantic, sub in by_sem.items():
        if semantic not in owner_pts:
            continue
        pts = np.vstack(owner_pts[semantic])
        ids = np.concatenate(owner_ids[semantic])
        dist, nn = cKDTree(pts).query(sub.points)
        owner = np.where(dist <= per_semantic[semantic].eps, ids[nn], -1)
        global_idx = np.flatnonzero(raw.semantic == int(semantic))
        for i in np.unique(owner[owner >= 0]):
            members[int(i)] = global_idx[owner == i]
    return [(semantic, raw.subset(members.get(i, np.zeros(0, dtype=np.int64)))) for i, (semantic, _) in enumerate(instances)]


def segment(cloud_path: str | Path, cfg: PipelineConfig) -> Path:
    """Cloud -> per-instance CSVs (preprocessed, and raw under raw/), census, manifest."""
    with tagged("segment"):
        t0 = time.perf_counter()
        raw = load_cloud(cloud_path)
        cloud = preprocess(raw, cfg.preprocess)
        per_semantic = cfg.cluster.per_semantic()
        instances = split_instances(cloud, per_semantic)

        out = _fresh(stage_dir(cfg.out_dir, "segment"))
        _debug_dump(out, cfg)
        entries = write_instances(instances, out)
        write_instances(raw_assignment(raw, instances, per_semantic), out / "raw")

        table = census(instances)
        (out / "census.csv").write_bytes(df_to_csv_bytes(table))
        (out / "census.json").write_bytes(to_json_bytes(table.to_dict(orient="records")))

        surface = [c.points for s, c in instances if s is Semantic.RoadSurface]
        length = round(obb_length(np.vstack(surface)), 3) if surface else None
        path = write_manifest(
            entries, out,
            segment_id=cfg.segment_id,
            source=Path(cloud_path).name,
            points_in=len(raw),
            points_kept=len(cloud),
            length_m=length,
        )
        _write_timing(out, seconds=time.perf_counter() - t0)
        logger.info("segment: %d instances from %d points", len(instances), len(cloud))
        return path


# =============================================================================
# extract
# =============================================================================

def extract(cfg: PipelineConfig, *, root: str | Path | None = None, semantics=None) -> Path:
    """Instances -> one JSON record each. Instances whose extraction fails are listed as skipped."""
    root = Path(root or cfg.out_dir)
    with tagged("extract"):
        t0 = time.perf_counter()
        src = stage_dir(cfg.out_dir, "segment")
        doc = read_manifest(src)
        entries = [e for e in doc["files"] if semantics is None or e["semantic"] in semantics]

        def work(entry):
            cloud = load_cloud(src / entry["file"])
            start = time.perf_counter()
            try:
                record = extract_instance(
                    cloud, cfg.extract, cfg.cluster.parts,
                    segment_id=cfg.segment_id, instance_id=int(entry["index"]),
                )
                error = None
            except DataError as exc:
                record, error = None, str(exc)
            return entry, record, error, time.perf_counter() - start

        results = map_ordered(work, entries, cfg.threads)

        out = _fresh(stage_dir(root, "extract"))
        _debug_dump(out, cfg)
        files, skipped = [], []
        for entry, record, error, _ in results:
            if record is None:
                logger.warning("%s skipped: %s", entry["name"], error)
                skipped.append({"name": entry["name"], "error": error})
                continue
            path = write_record(record, out)
            files.append({
                "file": path.name,
                "name": entry["name"],
                "semantic": entry["semantic"],
                "record_id": record.record_id,
                "polygons": _polygon_count(record),
                "warnings": len(record.meta.warnings),
            })
        manifest = write_manifest(files, out, segment_id=cfg.segment_id, skipped=skipped, length_m=doc.get("length_m"))
        _write_timing(
            out,
            seconds=time.perf_counter() - t0,
            extract_s=_per_asset((e["semantic"], dt) for e, _, _, dt in results),
        )
        logger.info("extract: %d record(s), %d skipped", len(files), len(skipped))
        return manifest


def _polygon_count(record) -> int:
    return (
        len(record.multipolygon)
        + sum(len(g.front) for g in record.guardrails)
        + sum(len(p) for p in record.poles)
        + sum(len(p.front) for p in record.panels)
        + sum(len(l) for l in record.lights)
    )


# =============================================================================
# build
# =============================================================================

def build(cfg: PipelineConfig, *, root: str | Path | None = None) -> Path:
    """JSON records -> one mesh file per record plus the merged segment mesh."""
    root = Path(root or cfg.out_dir)
    with tagged("build"):
        t0 = time.perf_counter()
        src = stage_dir(root, "extract")
        doc = read_manifest(src)

        def work(entry):
            record = read_record(src / entry["file"])
            start = time.perf_counter()
            meshes = build_record_mesh(record, cfg.mesh)
            return entry, record, meshes, time.perf_counter() - start

        results = map_ordered(work, doc["files"], cfg.threads)

        out = _fresh(stage_dir(root, "build"))
        _debug_dump(out, cfg)
        files, merged = [], []
        for entry, record, meshes, _ in results:
            path = export(meshes, out / f"{record.record_id}.{cfg.mesh_format}")
            files.append({
                "file": path.name,
                "name": entry["name"],
                "semantic": entry["semantic"],
                "record_id": record.record_id,
                "faces": int(sum(len(m) for m in meshes)),
            })
            merged.extend(m.renamed(f"{record.record_id}/{m.name}") for m in meshes)
        fields = {"segment_id": doc.get("segment_id", cfg.segment_id), "merged": None}
        if cfg.mesh.merged:
            fields["merged"] = export(merged, out / f"segment.{cfg.mesh_format}").name
        manifest = write_manifest(files, out, **fields)
        _write_timing(
            out,
            seconds=time.perf_counter() - t0,
            mesh_s=_per_asset((e["semantic"], dt) for e, _, _, dt in results),
        )
        logger.info("build: %d mesh file(s)", len(files))
        return manifest


# =============================================================================
# evaluate
# =============================================================================

def evaluate(cfg: PipelineConfig, *, root: str | Path | None = None, semantics=None):
    """Instance points vs. their built meshes -> distance report (JSON + CSV table)."""
    root = Path(root or cfg.out_dir)
    with tagged("evaluate"):
        seg = stage_dir(cfg.out_dir, "segment")
        seg_doc = read_manifest(seg)
        bld = stage_dir(root, "build")
        bld_doc = read_manifest(bld)
        gt_dir = seg / "raw" if cfg.raw_gt else seg

        meshes = {e["name"]: read_meshes(bld / e["file"]) for e in bld_doc["files"]}
        instances = [
            (e["name"], Semantic[e["semantic"]], load_cloud(gt_dir / e["file"]).points)
            for e in seg_doc["files"]
            if semantics is None or e["semantic"] in semantics
        ]
        report = evaluate_distances(instances, meshes)

        out = _fresh(stage_dir(root, "evaluate"))
        _debug_dump(out, cfg)
        (out / "distance.json").write_bytes(to_json_bytes(report.to_dict()))
        (out / "distance.csv").write_bytes(df_to_csv_bytes(report.table(), index=True))
        write_manifest(
            [{"file": "distance.json"}, {"file": "distance.csv"}], out,
            gt="raw" if cfg.raw_gt else "preprocessed",
            excluded=report.excluded,
        )
        logger.info("evaluate: overall avg %.2f cm over %d points", report.overall.avg * 100, report.overall.count)
        return report


# =============================================================================
# report
# =============================================================================

def report(cfg: PipelineConfig, *, pipeline_s: float | None = None) -> Path:
    """Timing and size tables (CSV + JSON) with PNG charts; the distance chart when evaluate ran."""
    with tagged("report"):
        root = Path(cfg.out_dir)
        seg_doc = read_manifest(stage_dir(root, "segment"))
        ext_dir, bld_dir = stage_dir(root, "extract"), stage_dir(root, "build")
        ext_doc, bld_doc = read_manifest(ext_dir), read_manifest(bld_dir)
        stage_times = [_read_timing(stage_dir(root, s)) for s in ("segment", "extract", "build")]
        if pipeline_s is None:
            pipeline_s = float(sum(t["seconds"] for t in stage_times))
        times = timing_report(
            stage_times[1].get("extract_s", {}),
            stage_times[2].get("mesh_s", {}),
            length_m=seg_doc.get("length_m"),
            pipeline_s=pipeline_s,
        )
        mesh_files = [bld_dir / e["file"] for e in bld_doc["files"]]
        sizes = size_report([ext_dir / e["file"] for e in ext_doc["files"]], mesh_files)

        out = _fresh(stage_dir(root, "report"))
        table = times.table()
        (out / "timing.csv").write_bytes(df_to_csv_bytes(table))
        (out / "timing.json").write_bytes(to_json_bytes(times.to_dict()))
        (out / "sizes.csv").write_bytes(df_to_csv_bytes(sizes))
        (out / "timing.png").write_bytes(render_timing_bars(table))
        files = ["timing.csv", "timing.json", "sizes.csv", "timing.png"]

        dist_csv = stage_dir(root, "evaluate") / "distance.csv"
        if dist_csv.is_file():
            dist = pd.read_csv(dist_csv, index_col=0)
            (out / "distance.csv").write_bytes(df_to_csv_bytes(dist, index=True))
            try:
                (out / "distance.png").write_bytes(render_distance_bars(dist))
                files.append("distance.png")
            except ValueError:
                logger.warning("report: distance table is empty, no chart")
            files.append("distance.csv")

        manifest = write_manifest([{"file": f} for f in sorted(files)], out)
        if times.speed_mps is not None:
            logger.info("report: %.1f m in %.1f s (%.2f m/s)", times.length_m, pipeline_s, times.speed_mps)
        return manifest


# =============================================================================
# run / sweep
# =============================================================================

def run(cloud_path: str | Path, cfg: PipelineConfig):
    """segment -> extract -> build -> evaluate -> report."""
    t0 = time.perf_counter()
    segment(cloud_path, cfg)
    extract(cfg)
    build(cfg)
    result = evaluate(cfg)
    report(cfg, pipeline_s=time.perf_counter() - t0)
    return result


def sweep(cfg: PipelineConfig, grid_sizes=DEFAULT_GRID_SIZES) -> pd.DataFrame:
    """
    Re-run extract -> build -> evaluate on the plane-like instances of the existing segment stage
    for each square grid size; one row per size under out/sweep/.
    """
    grid_sizes = list(grid_sizes)
    base = stage_dir(cfg.out_dir, "sweep")
    with tagged("sweep"):
        if not grid_sizes:
            raise DataError("sweep needs at least one grid size")
        _fresh(base)
    rows = []
    for g in grid_sizes:
        sub = cfg.model_copy(update={"extract": cfg.extract.model_copy(update={"grid_w": g, "grid_l": g})})
        root = base / f"grid_{g:g}"
        extract(sub, root=root, semantics=PLANE_LIKE_NAMES)
        build(sub, root=root)
        result = evaluate(sub, root=root, semantics=PLANE_LIKE_NAMES)
        count, avg, std = plane_like_stats(result)
        ext_doc = read_manifest(stage_dir(root, "extract"))
        rows.append({
            "grid_size": g,
            "avg_cm": avg * 100,
            "std_cm": std * 100,
            "points": count,
            "cells": int(sum(e["polygons"] for e in ext_doc["files"])),
            "extract_s": float(sum(_read_timing(stage_dir(root, "extract"))["extract_s"].values())),
        })
        logger.info("sweep: grid %g m -> avg %.2f cm", g, avg * 100)

    with tagged("sweep"):
        df = sweep_rows_to_df(rows)
        (base / "sweep.csv").write_bytes(df_to_csv_bytes(df))
        (base / "sweep.png").write_bytes(render_sweep(df))
        write_manifest(
            [{"file": "sweep.csv"}, {"file": "sweep.png"}], base,
            grid_sizes=[float(g) for g in grid_sizes],
        )
    return df
