from __future__ import annotations
import io
import matplotlib
matplotlib.use("Agg") # headless-safe
import matplotlib.pyplot as plt
import numpy as np


def _png(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    buf.seek(0)
    return buf.getvalue()


def render_distance_bars(table, *, width=1000, height=450, title: str = "Distance to geometry (cm)") -> bytes:
    """Grouped Avg/Std bars per asset; `table` is DistanceReport.table() (rows Avg, Std)."""
    if table.empty:
        raise ValueError("No data to plot")
    cols = [c for c in table.columns if not np.isnan(table.loc["Avg", c])]
    if not cols:
        raise ValueError("No data to plot")
    x = np.arange(len(cols))
    fig = plt.figure(figsize=(width/100, height/100), dpi=100)
    ax = fig.add_subplot(111)
    ax.bar(x - 0.2, table.loc["Avg", cols].to_numpy(float), width=0.4, label="Avg")
    ax.bar(x + 0.2, table.loc["Std", cols].to_numpy(float), width=0.4, label="Std")
    ax.set_xticks(x, cols, rotation=20)
    ax.set_ylabel("cm")
    ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.25)
    ax.legend(loc="best")
    return _png(fig)


def render_timing_bars(table, *, width=1000, height=450, title: str = "Processing time (s)") -> bytes:
    """Stacked extract/mesh seconds per asset; the Total row is left out."""
    rows = table[table["asset"] != "Total"]
    if rows.empty:
        raise ValueError("No data to plot")
    fig = plt.figure(figsize=(width/100, height/100), dpi=100)
    ax = fig.add_subplot(111)
    ax.bar(rows["asset"], rows["extract_s"], label="extract")
    ax.bar(rows["asset"], rows["mesh_s"], bottom=rows["extract_s"], label="mesh")
    ax.tick_params(axis="x", rotation=20)
    ax.set_ylabel("s")
    ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.25)
    ax.legend(loc="best")
    return _png(fig)


def render_sweep(df, *, width=1000, height=450, title: str = "Grid size sweep") -> bytes:
    """Plane-like Avg (cm) and extraction seconds against grid size, largest grid on the left."""
    if df.empty:
        raise ValueError("No data to plot")
    df = df.sort_values("grid_size", ascending=False)
    labels = [f"{g:g}" for g in df["grid_size"]]
    fig = plt.figure(figsize=(width/100, height/100), dpi=100)
    ax = fig.add_subplot(111)
    ax.plot(labels, df["avg_cm"], marker="o", linewidth=1.5, label="Avg (cm)")
    ax.set_xlabel("grid size (m)")
    ax.set_ylabel("cm")
    ax.grid(True, alpha=0.25)
    twin = ax.twinx()
    twin.plot(labels, df["extract_s"], marker="s", linewidth=1.0, color="tab:orange", label="extract (s)")
    twin.set_ylabel("s")
    ax.set_title(title)
    handles = ax.get_legend_handles_labels()
    more = twin.get_legend_handles_labels()
    ax.legend(handles[0] + more[0], handles[1] + more[1], loc="best")
    return _png(fig)
