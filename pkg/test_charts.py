import numpy as np
import pandas as pd
import pytest

from charts import df_to_csv_bytes, pooled, render_distance_bars, render_sweep, render_timing_bars, sweep_rows_to_df, to_json_bytes
from metrics import DistanceStats, timing
from metrics.report import DistanceReport

PNG = b"\x89PNG"


def test_pooled_matches_concatenation(rng):
    groups = [rng.normal(m, s, n) for m, s, n in ((0.01, 0.002, 300), (0.03, 0.01, 50), (0.0, 0.0, 0))]
    n, mean, std = pooled([(len(g), g.mean() if len(g) else np.nan, g.std() if len(g) else np.nan) for g in groups])
    everything = np.concatenate(groups)
    assert n == 350
    assert mean == pytest.approx(everything.mean())
    assert std == pytest.approx(everything.std())
    assert np.isnan(pooled([])[1])


def test_sweep_table_is_sorted_and_rounded():
    rows = [
        {"grid_size": 0.5, "avg_cm": 0.51234, "std_cm": 0.3, "points": 10, "cells": 40, "extract_s": 1.23456},
        {"grid_size": 2.0, "avg_cm": 0.9, "std_cm": 0.6, "points": 10, "cells": 3, "extract_s": 0.2},
    ]
    df = sweep_rows_to_df(rows)
    assert list(df["grid_size"]) == [2.0, 0.5]
    assert df.loc[1, "avg_cm"] == 0.51
    assert df.loc[1, "extract_s"] == 1.235
    assert sweep_rows_to_df([]).empty
    assert render_sweep(df).startswith(PNG)


def test_distance_and_timing_charts():
    report = DistanceReport({"RoadSurface": DistanceStats(10, 0.004, 0.003)}, DistanceStats(10, 0.004, 0.003))
    assert render_distance_bars(report.table()).startswith(PNG)
    empty = DistanceReport({}, DistanceStats.of(np.zeros(0)))
    with pytest.raises(ValueError):
        render_distance_bars(empty.table().drop(columns="Mean"))
    assert render_timing_bars(timing({"RoadSign": 1.0}, {"RoadSign": 0.5}).table()).startswith(PNG)


def test_exported_bytes_are_stable():
    df = pd.DataFrame({"asset": ["RoadSign"], "count": [3]})
    assert df_to_csv_bytes(df) == b"asset,count\nRoadSign,3\n"
    assert to_json_bytes({"b": 1, "a": None}) == b'{\n  "a": null,\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        to_json_bytes({"x": float("nan")})
