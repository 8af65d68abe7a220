#!/usr/bin/env python3
"""One-at-a-time screening over the seven default factors.

Runs the 1 + 2k OAT design on the baseline week, ranks factor impact per
target metric, and renders the screening lines and the rank heatmap.
"""

import argparse
import json
from pathlib import Path

from mesbench.analysis import oat_ranking, write_ranking_json
from mesbench.campaign import RESULTS_COLUMNS_FIXED, read_results_csv, run_campaign
from mesbench.plots import plot_oat, plot_ranking
from mesbench.sampling import oat_design
from mesbench.scenario import baseline_config, default_factors


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/screening", type=Path)
    parser.add_argument("--jobs", default=4, type=int)
    parser.add_argument("--horizon-days", default=7, type=float)
    args = parser.parse_args()

    from dataclasses import replace
    config = replace(baseline_config(), horizon_s=args.horizon_days * 86400.0)
    design = oat_design(default_factors())
    print(f"running {len(design)} simulations ...")
    result = run_campaign(design, config, parallelism=args.jobs, out_dir=args.out)
    print(f"{result.n_ok}/{len(result.statuses)} runs ok")

    _, rows = read_results_csv(args.out / "results.csv")
    metric_values = {
        column: {row["run_id"]: row[column] for row in rows if row[column] is not None}
        for column in RESULTS_COLUMNS_FIXED
    }
    ranking = oat_ranking(design.meta, metric_values)
    write_ranking_json(ranking, args.out / "ranking.json")

    plot_dir = args.out / "plots"
    plot_oat(design.meta, rows, RESULTS_COLUMNS_FIXED, plot_dir)
    plot_ranking(json.loads((args.out / "ranking.json").read_text()), plot_dir)

    print("\naggregate mean rank (1 = strongest):")
    for factor, rank in sorted(ranking.aggregate.items(), key=lambda kv: kv[1]):
        print(f"  {factor:24s} {rank:.2f}")
    print(f"\nplots and tables in {plot_dir}")


if __name__ == "__main__":
    main()
