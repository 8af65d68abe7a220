"""Configurable plots of campaign and analysis outputs.

Every figure is written as SVG with the plotted numbers alongside as CSV, so
results stay inspectable without re-running anything. Styles follow the
usual sensitivity-study conventions: paired index bars with confidence
whiskers, per-factor screening lines, a rank heatmap, and response-surface
curves/contours.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import MetaModel, surface

__all__ = ["plot_sobol", "plot_oat", "plot_ranking", "plot_surface"]


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def plot_sobol(sobol_doc: dict, out_dir: str | Path) -> list[Path]:
    """One paired-bar SVG per metric from an analysis.json document."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for metric, payload in sobol_doc.items():
        factors = list(payload["factors"].keys())
        s1 = [payload["factors"][f]["s1"] for f in factors]
        s1_conf = [payload["factors"][f]["s1_conf"] for f in factors]
        st = [payload["factors"][f]["st"] for f in factors]
        st_conf = [payload["factors"][f]["st_conf"] for f in factors]

        x = np.arange(len(factors))
        width = 0.38
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.bar(x - width / 2, s1, width, yerr=s1_conf, capsize=3,
               label="first order", color="tab:blue")
        ax.bar(x + width / 2, st, width, yerr=st_conf, capsize=3,
               label="total effect", color="tab:orange")
        ax.set_xticks(x)
        ax.set_xticklabels(factors, rotation=20, ha="right")
        ax.set_ylabel("sensitivity index")
        ax.set_title(metric)
        ax.legend()
        ax.axhline(0.0, color="black", linewidth=0.6)
        fig.tight_layout()
        svg = out_dir / f"sobol_{metric}.svg"
        fig.savefig(svg)
        plt.close(fig)

        _write_csv(out_dir / f"sobol_{metric}.csv",
                   ["factor", "s1", "s1_conf", "st", "st_conf"],
                   zip(factors, s1, s1_conf, st, st_conf))
        written += [svg, out_dir / f"sobol_{metric}.csv"]
    return written


def plot_oat(design_meta: dict, results_rows: list[dict], metric_columns: list[str],
             out_dir: str | Path) -> list[Path]:
    """Per-metric screening lines: metric over each factor's min/base/max."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_run = {row["run_id"]: row for row in results_rows}
    triples: dict[str, list[int]] = design_meta["triples"]
    written = []

    for metric in metric_columns:
        fig, ax = plt.subplots(figsize=(6, 4))
        csv_rows = []
        for factor, (base_id, lo_id, hi_id) in sorted(triples.items()):
            runs = [(lo_id, "min"), (base_id, "base"), (hi_id, "max")]
            xs, ys = [], []
            for pos, (run_id, label) in enumerate(runs):
                row = by_run.get(run_id)
                if row is None or row.get(metric) is None:
                    continue
                xs.append(pos)
                ys.append(row[metric])
                csv_rows.append([metric, factor, label, row[factor], row[metric]])
            if xs:
                ax.plot(xs, ys, marker="o", label=factor)
        ax.set_xticks([0, 1, 2])
        ax.set_xticklabels(["min", "base", "max"])
        ax.set_ylabel(metric)
        ax.set_title(f"one-at-a-time response: {metric}")
        ax.legend(fontsize=8)
        fig.tight_layout()
        svg = out_dir / f"oat_{metric}.svg"
        fig.savefig(svg)
        plt.close(fig)
        _write_csv(out_dir / f"oat_{metric}.csv",
                   ["metric", "factor", "position", "factor_value", "metric_value"],
                   csv_rows)
        written += [svg, out_dir / f"oat_{metric}.csv"]
    return written


def plot_ranking(ranking_doc: dict, out_dir: str | Path) -> list[Path]:
    """Heatmap of per-metric factor ranks (1 = most influential)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rankings = ranking_doc["rankings"]
    metrics = list(rankings.keys())
    factors = sorted({e["factor"] for scores in rankings.values() for e in scores})
    grid = np.full((len(factors), len(metrics)), np.nan)
    for j, metric in enumerate(metrics):
        for entry in rankings[metric]:
            grid[factors.index(entry["factor"]), j] = entry["rank"]

    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(metrics), 1.0 + 0.5 * len(factors)))
    im = ax.imshow(grid, cmap="viridis_r", aspect="auto")
    ax.set_xticks(range(len(metrics)))
    ax.set_xticklabels(metrics, rotation=30, ha="right", fontsize=8)
    ax.set_yticks(range(len(factors)))
    ax.set_yticklabels(factors, fontsize=8)
    for i in range(len(factors)):
        for j in range(len(metrics)):
            if np.isfinite(grid[i, j]):
                ax.text(j, i, int(grid[i, j]), ha="center", va="center",
                        color="white", fontsize=8)
    fig.colorbar(im, ax=ax, label="rank (1 = strongest)")
    ax.set_title("factor impact ranking")
    fig.tight_layout()
    svg = out_dir / "ranking.svg"
    fig.savefig(svg)
    plt.close(fig)

    csv_rows = [
        [metric, e["factor"], e["rank"], e["score"]]
        for metric in metrics for e in rankings[metric]
    ]
    _write_csv(out_dir / "ranking.csv", ["metric", "factor", "rank", "score"], csv_rows)
    written = [svg, out_dir / "ranking.csv"]
    if "aggregate" in ranking_doc:
        _write_csv(out_dir / "ranking_aggregate.csv", ["factor", "mean_rank"],
                   sorted(ranking_doc["aggregate"].items()))
        written.append(out_dir / "ranking_aggregate.csv")
    return written


def plot_surface(model: MetaModel, out_dir: str | Path, name: str = "surface",
                 points_per_axis: int | None = None) -> list[Path]:
    """Response-surface curve (1 axis) or filled contour (2 axes) plus CSV.

    The CSV grid defaults to 8 points per axis for two-axis models and 25
    for curves.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    two_axis = len(model.axes) == 2
    p = points_per_axis if points_per_axis is not None else (8 if two_axis else 25)
    rows = surface(model, points_per_axis=p)

    if not two_axis:
        xs = [r[0] for r in rows]
        ys = [r[1] for r in rows]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(xs, ys, marker="o")
        ax.set_xlabel(model.axes[0])
        ax.set_ylabel("prediction")
        ax.set_title(f"meta-model (degree {model.degree}, R^2={model.r_squared:.4f})")
        header = [model.axes[0], "prediction"]
    else:
        xs = np.array(sorted({r[0] for r in rows}))
        ys = np.array(sorted({r[1] for r in rows}))
        zz = np.array([r[2] for r in rows]).reshape(len(xs), len(ys))
        fig, ax = plt.subplots(figsize=(6, 4.5))
        cf = ax.contourf(xs, ys, zz.T, levels=14, cmap="viridis")
        fig.colorbar(cf, ax=ax, label="prediction")
        ax.set_xlabel(model.axes[0])
        ax.set_ylabel(model.axes[1])
        ax.set_title(f"meta-model (degree {model.degree}, R^2={model.r_squared:.4f})")
        header = [model.axes[0], model.axes[1], "prediction"]

    fig.tight_layout()
    svg = out_dir / f"{name}.svg"
    fig.savefig(svg)
    plt.close(fig)
    _write_csv(out_dir / f"{name}.csv", header, rows)
    return [svg, out_dir / f"{name}.csv"]
