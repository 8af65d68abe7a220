import csv
import json

import pytest

from mesbench.campaign import read_results_csv
from mesbench.cli import main
from mesbench.scenario import (
    Factor,
    default_factors,
    write_config,
    write_factors,
)


@pytest.fixture
def workspace(tmp_path, day_config):
    write_config(day_config, tmp_path / "config.json")
    write_factors(default_factors(), tmp_path / "factors.json")
    return tmp_path


def run_cli(*args):
    return main([str(a) for a in args])


class TestExitCodes:
    def test_usage_error_is_one(self, capsys):
        with pytest.raises(SystemExit) as err:
            run_cli("campaign", "--design", "bogus")
        assert err.value.code == 1

    def test_missing_subcommand_is_one(self):
        with pytest.raises(SystemExit) as err:
            run_cli()
        assert err.value.code == 1

    def test_validation_error_is_two(self, workspace, capsys):
        bad = workspace / "bad_factors.json"
        bad.write_text(json.dumps([{"name": "x", "kind": "design",
                                    "min": 5, "max": 1, "base": 3}]))
        code = run_cli("campaign", "--design", "oat", "--factors", bad,
                       "--config", workspace / "config.json",
                       "--out", workspace / "out")
        assert code == 2
        assert "x" in capsys.readouterr().err

    def test_missing_file_is_two(self, workspace, capsys):
        code = run_cli("run", "--config", workspace / "nope.json",
                       "--recipe", workspace / "nope.json",
                       "--out", workspace / "out")
        assert code == 2


class TestWorkflow:
    def test_oat_campaign_analyze_plot(self, workspace, capsys):
        out = workspace / "oat"
        assert run_cli("campaign", "--design", "oat",
                       "--factors", workspace / "factors.json",
                       "--config", workspace / "config.json",
                       "--out", out, "--jobs", "2") == 0
        assert (out / "results.csv").exists()
        assert (out / "recipes.json").exists()

        ranking = workspace / "ranking.json"
        assert run_cli("analyze", "--kind", "oat", "--runs", out,
                       "--out", ranking) == 0
        doc = json.loads(ranking.read_text())
        assert set(doc) == {"rankings", "aggregate"}
        assert len(doc["aggregate"]) == 7

        plots = workspace / "plots"
        assert run_cli("plot", "--kind", "ranking", "--in", ranking,
                       "--out", plots) == 0
        assert (plots / "ranking.svg").exists()

        assert run_cli("plot", "--kind", "oat", "--in", out / "results.csv",
                       "--out", plots) == 0
        assert (plots / "oat_max_v2_pu.svg").exists()

    def test_sobol_campaign_and_analysis(self, workspace):
        # two factors, tiny N: exercises the full saltelli path quickly
        write_factors([f for f in default_factors()
                       if f.name in ("pv_scaling", "hwt_inner_diameter")],
                      workspace / "two.json")
        out = workspace / "sobol"
        assert run_cli("campaign", "--design", "sobol", "--samples", "8",
                       "--factors", workspace / "two.json",
                       "--config", workspace / "config.json",
                       "--out", out, "--jobs", "4") == 0
        _, rows = read_results_csv(out / "results.csv")
        assert len(rows) == 8 * (2 + 2)

        analysis = workspace / "analysis.json"
        assert run_cli("analyze", "--kind", "sobol", "--runs", out,
                       "--metric", "max_v2_pu", "--out", analysis) == 0
        doc = json.loads(analysis.read_text())
        assert "max_v2_pu" in doc
        assert set(doc["max_v2_pu"]["factors"]) == {"pv_scaling", "hwt_inner_diameter"}

        plots = workspace / "plots"
        assert run_cli("plot", "--kind", "sobol", "--in", analysis,
                       "--out", plots) == 0
        assert (plots / "sobol_max_v2_pu.svg").exists()

    def test_grid_campaign_metamodel_surface(self, workspace):
        out = workspace / "grid"
        assert run_cli("campaign", "--design", "grid",
                       "--axes", "hwt_inner_diameter", "--points", "8",
                       "--factors", workspace / "factors.json",
                       "--config", workspace / "config.json",
                       "--out", out) == 0
        model_path = workspace / "metamodel.json"
        assert run_cli("analyze", "--kind", "metamodel", "--runs", out,
                       "--metric", "self_cons_pct", "--degree", "3",
                       "--out", model_path) == 0
        doc = json.loads(model_path.read_text())
        assert doc["degree"] == 3
        assert doc["axes"][0]["name"] == "hwt_inner_diameter"

        plots = workspace / "plots"
        assert run_cli("plot", "--kind", "surface", "--in", model_path,
                       "--out", plots, "--points", "8") == 0
        with open(plots / "metamodel.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 8

    def test_two_axis_grid_campaign_and_surface(self, workspace):
        out = workspace / "grid2"
        assert run_cli("campaign", "--design", "grid",
                       "--axes", "hwt_inner_diameter,pv_scaling", "--points", "3",
                       "--factors", workspace / "factors.json",
                       "--config", workspace / "config.json",
                       "--out", out, "--jobs", "3") == 0
        _, rows = read_results_csv(out / "results.csv")
        assert len(rows) == 9
        model_path = workspace / "mm2.json"
        assert run_cli("analyze", "--kind", "metamodel", "--runs", out,
                       "--metric", "max_v2_pu", "--degree", "2",
                       "--out", model_path) == 0
        plots = workspace / "plots2"
        assert run_cli("plot", "--kind", "surface", "--in", model_path,
                       "--out", plots) == 0
        with open(plots / "mm2.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 64  # default 8x8 evaluation grid

    def test_single_run_subcommand(self, workspace):
        recipe = workspace / "recipe.json"
        recipe.write_text(json.dumps(
            {"run_id": 3, "assignments": {"pv_scaling": 1.5}}))
        out = workspace / "single"
        assert run_cli("run", "--config", workspace / "config.json",
                       "--recipe", recipe, "--out", out) == 0
        assert (out / "run_00003.csv").exists()
        metrics = json.loads((out / "run_00003.metrics.json").read_text())
        assert "max_voltage_bus2" in metrics

    def test_analyze_wrong_design_kind_is_validation_error(self, workspace, capsys):
        out = workspace / "oat2"
        run_cli("campaign", "--design", "oat",
                "--factors", workspace / "factors.json",
                "--config", workspace / "config.json", "--out", out)
        code = run_cli("analyze", "--kind", "sobol", "--runs", out,
                       "--out", workspace / "x.json")
        assert code == 2

    def test_seed_override_changes_hash(self, workspace):
        out_a = workspace / "a"
        out_b = workspace / "b"
        factors = workspace / "one.json"
        write_factors([Factor("pv_scaling", "scenario", 0.5, 2.0, 1.0)], factors)
        run_cli("campaign", "--design", "grid", "--axes", "pv_scaling",
                "--points", "2", "--factors", factors,
                "--config", workspace / "config.json", "--out", out_a)
        run_cli("campaign", "--design", "grid", "--axes", "pv_scaling",
                "--points", "2", "--factors", factors,
                "--config", workspace / "config.json", "--out", out_b,
                "--seed", "777")
        hash_a = json.loads((out_a / "design.json").read_text())["config_hash"]
        hash_b = json.loads((out_b / "design.json").read_text())["config_hash"]
        assert hash_a != hash_b
