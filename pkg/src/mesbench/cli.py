"""Command-line entry point.

Subcommands mirror the workflow: ``campaign`` generates a design and runs
it, ``run`` executes one recipe, ``analyze`` post-processes a campaign
directory, ``plot`` renders analysis outputs. Exit codes: 0 ok, 1 usage,
2 validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .analysis import (
    AnalysisError,
    fit_metamodel,
    load_metamodel_json,
    oat_ranking,
    sobol_indices,
    write_metamodel_json,
    write_ranking_json,
    write_sobol_json,
)
from .campaign import (
    CampaignError,
    RESULTS_COLUMNS_FIXED,
    check_provenance,
    read_results_csv,
    run_campaign,
)
from .metrics import compute_metrics
from .plots import plot_oat, plot_ranking, plot_sobol, plot_surface
from .sampling import DesignError, grid_design, oat_design, saltelli_design
from .scenario import (
    FactorError,
    Recipe,
    apply_recipe,
    load_config,
    load_factors,
)
from .sim import SimulationError, simulate, trajectory_to_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

_VALIDATION_ERRORS = (FactorError, DesignError, AnalysisError, CampaignError,
                      ValueError, KeyError, FileNotFoundError, json.JSONDecodeError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mesbench",
                     description="multi-energy benchmark scaling workbench")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("campaign", help="generate a design and run it")
    p.add_argument("--design", required=True, choices=["oat", "sobol", "grid"])
    p.add_argument("--factors", required=True, help="factors.json")
    p.add_argument("--config", required=True, help="config.json")
    p.add_argument("--samples", type=int, default=1024,
                   help="sobol design: base sample count N")
    p.add_argument("--second-order", action="store_true",
                   help="sobol design: add the second-order sample blocks")
    p.add_argument("--axes", default="", help="grid design: 1 or 2 factor names, comma separated")
    p.add_argument("--points", type=int, default=8, help="grid design: points per axis")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p = sub.add_parser("run", help="execute a single recipe")
    p.add_argument("--config", required=True)
    p.add_argument("--recipe", required=True,
                   help="recipe.json (single object or one-element array)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="post-process a campaign directory")
    p.add_argument("--kind", required=True, choices=["sobol", "oat", "metamodel"])
    p.add_argument("--runs", required=True, help="campaign output directory")
    p.add_argument("--metric", default=None,
                   help=f"metric column ({', '.join(RESULTS_COLUMNS_FIXED)})")
    p.add_argument("--degree", type=int, default=4, help="meta-model polynomial degree")
    p.add_argument("--out", required=True, help="output JSON file")

    p = sub.add_parser("plot", help="render analysis outputs as SVG + CSV")
    p.add_argument("--kind", required=True, choices=["sobol", "oat", "ranking", "surface"])
    p.add_argument("--in", dest="in_path", required=True,
                   help="analysis.json / results.csv / ranking.json / metamodel.json")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--points", type=int, default=None,
                   help="surface: grid points per axis")
    return parser


def _cmd_campaign(args) -> int:
    factors = load_factors(args.factors)
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)

    if args.design == "oat":
        design = oat_design(factors)
    elif args.design == "sobol":
        design = saltelli_design(factors, args.samples, second_order=args.second_order)
    else:
        axes = [a for a in args.axes.split(",") if a]
        design = grid_design(factors, axes, args.points)

    result = run_campaign(design, config, parallelism=args.jobs, out_dir=args.out)
    failed = {rid: s for rid, s in result.statuses.items() if s != "ok"}
    print(f"{result.design_kind} campaign: {result.n_ok}/{len(result.statuses)} runs ok "
          f"-> {result.out_dir / 'results.csv'}")
    for rid, status in sorted(failed.items()):
        print(f"  run {rid}: {status}", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_RUNTIME


def _cmd_run(args) -> int:
    config = load_config(args.config)
    doc = json.loads(Path(args.recipe).read_text())
    if isinstance(doc, list):
        if len(doc) != 1:
            raise FactorError("run expects exactly one recipe")
        doc = doc[0]
    recipe = Recipe(run_id=doc.get("run_id", 0),
                    assignments={k: float(v) for k, v in doc["assignments"].items()},
                    design_tag=doc.get("design_tag", ""))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trajectory = simulate(apply_recipe(config, recipe))
    metrics = compute_metrics(trajectory)
    trajectory_to_csv(trajectory, out_dir / f"run_{recipe.run_id:05d}.csv")
    (out_dir / f"run_{recipe.run_id:05d}.metrics.json").write_text(
        json.dumps(metrics.as_dict(), indent=2) + "\n")
    print(f"run {recipe.run_id}: trajectory and metrics written to {out_dir}")
    return EXIT_OK


def _metric_columns(requested: str | None) -> list[str]:
    if requested is None:
        return list(RESULTS_COLUMNS_FIXED)
    if requested not in RESULTS_COLUMNS_FIXED:
        raise AnalysisError(
            f"unknown metric {requested!r}; choose from {RESULTS_COLUMNS_FIXED}")
    return [requested]


def _cmd_analyze(args) -> int:
    runs_dir = Path(args.runs)
    design_doc = check_provenance(runs_dir)
    _, rows = read_results_csv(runs_dir / "results.csv")
    meta = design_doc["meta"]
    kind = design_doc["kind"]

    if args.kind == "sobol":
        if kind != "saltelli":
            raise AnalysisError(f"--kind sobol needs a sobol campaign, found {kind!r}")
        results = []
        for column in _metric_columns(args.metric):
            outputs = [row[column] for row in sorted(rows, key=lambda r: r["run_id"])]
            if any(v is None for v in outputs):
                raise AnalysisError(
                    f"metric {column!r}: failed runs leave the Saltelli blocks "
                    "incomplete; re-run the campaign")
            import numpy as np
            results.append(sobol_indices(meta, outputs, metric=column,
                                         rng=np.random.default_rng(design_doc["seed"])))
        write_sobol_json(results, args.out)
    elif args.kind == "oat":
        if kind != "oat":
            raise AnalysisError(f"--kind oat needs an oat campaign, found {kind!r}")
        metric_values = {
            column: {row["run_id"]: row[column] for row in rows if row[column] is not None}
            for column in _metric_columns(args.metric)
        }
        write_ranking_json(oat_ranking(meta, metric_values), args.out)
    else:
        if kind != "grid":
            raise AnalysisError(f"--kind metamodel needs a grid campaign, found {kind!r}")
        if args.metric is None:
            raise AnalysisError("--kind metamodel requires --metric")
        column = _metric_columns(args.metric)[0]
        axes = meta["axes"]
        complete = [row for row in rows if row[column] is not None]
        if len(complete) < len(rows):
            import warnings
            warnings.warn(f"{len(rows) - len(complete)} failed runs excluded from the fit")
        x = [[row[a] for a in axes] for row in complete]
        y = [row[column] for row in complete]
        ranges = [(min(meta["values"][a]), max(meta["values"][a])) for a in axes]
        model = fit_metamodel(x, y, axes, ranges, degree=args.degree)
        write_metamodel_json(model, args.out)
    print(f"analysis written to {args.out}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    in_path = Path(args.in_path)
    if args.kind == "sobol":
        written = plot_sobol(json.loads(in_path.read_text()), args.out)
    elif args.kind == "ranking":
        written = plot_ranking(json.loads(in_path.read_text()), args.out)
    elif args.kind == "oat":
        design_doc = json.loads((in_path.parent / "design.json").read_text())
        _, rows = read_results_csv(in_path)
        written = plot_oat(design_doc["meta"], rows, RESULTS_COLUMNS_FIXED, args.out)
    else:
        model = load_metamodel_json(in_path)
        written = plot_surface(model, args.out, name=in_path.stem,
                               points_per_axis=args.points)
    for path in written:
        print(path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "campaign": _cmd_campaign,
        "run": _cmd_run,
        "analyze": _cmd_analyze,
        "plot": _cmd_plot,
    }
    try:
        return handlers[args.command](args)
    except _VALIDATION_ERRORS as exc:
        print(f"mesbench {args.command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SimulationError, OSError) as exc:
        print(f"mesbench {args.command}: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
