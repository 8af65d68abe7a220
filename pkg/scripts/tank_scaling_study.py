#!/usr/bin/env python3
"""Hot-water-tank sizing study via response-surface meta-models.

Sweeps the tank inner diameter over 1-8 m (height fixed at 7.9 m), fits a
polynomial surface per target metric, and optionally repeats the sweep as a
two-factor grid against PV scaling or heat-profile scaling to show how the
sizing conclusions shift with the scenario.
"""

import argparse
from pathlib import Path

from mesbench.analysis import fit_metamodel, write_metamodel_json
from mesbench.campaign import read_results_csv, run_campaign
from mesbench.plots import plot_surface
from mesbench.sampling import grid_design
from mesbench.scenario import baseline_config, default_factors

METRICS = ["max_v2_pu", "avg_cop", "self_cons_pct", "min_tsupply_c"]


def fit_and_plot(out: Path, meta: dict, rows: list[dict], degree: int) -> None:
    axes = meta["axes"]
    ranges = [(min(meta["values"][a]), max(meta["values"][a])) for a in axes]
    for metric in METRICS:
        usable = [row for row in rows if row[metric] is not None]
        x = [[row[a] for a in axes] for row in usable]
        y = [row[metric] for row in usable]
        model = fit_metamodel(x, y, axes, ranges, degree=degree)
        write_metamodel_json(model, out / f"metamodel_{metric}.json")
        plot_surface(model, out / "plots", name=f"surface_{metric}",
                     points_per_axis=meta["points_per_axis"])
        print(f"  {metric:16s} degree {degree}: R^2={model.r_squared:.4f} "
              f"max residual {model.max_abs_residual:.3g}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/tank_scaling", type=Path)
    parser.add_argument("--jobs", default=4, type=int)
    parser.add_argument("--points", default=8, type=int)
    parser.add_argument("--degree", default=4, type=int)
    parser.add_argument("--second-axis", default=None,
                        choices=["pv_scaling", "heat_profile_scaling"],
                        help="add a second grid axis for a combined sweep")
    args = parser.parse_args()

    config = baseline_config()
    factors = default_factors()
    axes = ["hwt_inner_diameter"] + ([args.second_axis] if args.second_axis else [])
    design = grid_design(factors, axes, args.points)
    print(f"grid over {' x '.join(axes)}: {len(design)} simulations ...")
    result = run_campaign(design, config, parallelism=args.jobs, out_dir=args.out)
    print(f"{result.n_ok}/{len(result.statuses)} runs ok")

    _, rows = read_results_csv(args.out / "results.csv")
    fit_and_plot(args.out, design.meta, rows, args.degree)
    print(f"\nsurfaces in {args.out / 'plots'}")


if __name__ == "__main__":
    main()
