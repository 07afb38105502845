__all__ = [
"df_to_csv_bytes",
"to_json_bytes",
"pooled",
"plane_like_stats",
"sweep_rows_to_df",
"render_distance_bars",
"render_timing_bars",
"render_sweep",
]


from .adapters import pooled, plane_like_stats, sweep_rows_to_df
from .exporters import df_to_csv_bytes, to_json_bytes
from .renderers import render_distance_bars, render_timing_bars, render_sweep
