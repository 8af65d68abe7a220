import json

import pytest

from mesbench.campaign import (
    CampaignError,
    check_provenance,
    config_hash,
    derive_run_seed,
    execute_single_run,
    read_results_csv,
    run_campaign,
)
from mesbench.sampling import CampaignDesign, grid_design, oat_design
from mesbench.scenario import Recipe, default_factors


def small_factors():
    return [f for f in default_factors()
            if f.name in ("pv_scaling", "hwt_inner_diameter")]


class TestRunCampaign:
    def test_oat_produces_one_row_per_recipe(self, day_config, tmp_path):
        design = oat_design(default_factors())
        result = run_campaign(design, day_config, parallelism=1, out_dir=tmp_path)
        assert len(result.statuses) == 15
        assert result.n_ok == 15
        _, rows = read_results_csv(tmp_path / "results.csv")
        assert [r["run_id"] for r in rows] == list(range(15))

    def test_parallelism_does_not_change_bytes(self, day_config, tmp_path):
        design = oat_design(small_factors())
        run_campaign(design, day_config, parallelism=1, out_dir=tmp_path / "serial")
        run_campaign(design, day_config, parallelism=4, out_dir=tmp_path / "pool")
        a = (tmp_path / "serial" / "results.csv").read_bytes()
        b = (tmp_path / "pool" / "results.csv").read_bytes()
        assert a == b

    def test_resume_skips_completed_runs_and_matches_bytes(self, day_config, tmp_path):
        design = oat_design(small_factors())
        full_dir = tmp_path / "full"
        run_campaign(design, day_config, parallelism=1, out_dir=full_dir)

        resumed_dir = tmp_path / "resumed"
        (resumed_dir / "runs").mkdir(parents=True)
        # pre-execute an arbitrary subset, as if a previous invocation died
        for recipe in design.recipes[:2]:
            execute_single_run(day_config, recipe, resumed_dir, day_config.seed)
        marker = (resumed_dir / "runs" / "run_00000.json").stat().st_mtime_ns
        run_campaign(design, day_config, parallelism=1, out_dir=resumed_dir)
        assert (resumed_dir / "runs" / "run_00000.json").stat().st_mtime_ns == marker
        assert (resumed_dir / "results.csv").read_bytes() == \
            (full_dir / "results.csv").read_bytes()

    def test_failed_run_is_isolated(self, day_config, tmp_path):
        design = oat_design(small_factors())
        poisoned = list(design.recipes)
        poisoned[3] = Recipe(3, {"no_such_factor": 1.0}, design_tag="poison")
        bad_design = CampaignDesign(design.kind, tuple(poisoned), design.meta)
        with pytest.warns(UserWarning, match="run 3"):
            result = run_campaign(bad_design, day_config, parallelism=1,
                                  out_dir=tmp_path)
        assert result.statuses[3].startswith("failed")
        assert result.n_ok == len(design) - 1
        _, rows = read_results_csv(tmp_path / "results.csv")
        assert rows[3]["max_v2_pu"] is None
        assert rows[2]["max_v2_pu"] is not None

    def test_duplicate_run_ids_rejected(self, day_config, tmp_path):
        design = oat_design(small_factors())
        recipes = list(design.recipes)
        recipes[1] = Recipe(0, recipes[1].assignments)
        with pytest.raises(CampaignError, match="duplicate"):
            run_campaign(CampaignDesign("oat", tuple(recipes), design.meta),
                         day_config, out_dir=tmp_path)

    def test_campaign_writes_recipes_and_design(self, day_config, tmp_path):
        design = grid_design(small_factors(), ["hwt_inner_diameter"], 3)
        run_campaign(design, day_config, parallelism=1, out_dir=tmp_path)
        assert (tmp_path / "recipes.json").exists()
        doc = json.loads((tmp_path / "design.json").read_text())
        assert doc["kind"] == "grid"
        assert doc["config_hash"] == config_hash(day_config)


class TestProvenance:
    def test_results_header_embeds_hash(self, day_config, tmp_path):
        design = grid_design(small_factors(), ["pv_scaling"], 2)
        run_campaign(design, day_config, parallelism=1, out_dir=tmp_path)
        first = (tmp_path / "results.csv").read_text().splitlines()[0]
        assert first.startswith("#")
        assert f"config_hash={config_hash(day_config)}" in first

    def test_check_provenance_accepts_consistent_dir(self, day_config, tmp_path):
        design = grid_design(small_factors(), ["pv_scaling"], 2)
        run_campaign(design, day_config, parallelism=1, out_dir=tmp_path)
        doc = check_provenance(tmp_path)
        assert doc["kind"] == "grid"

    def test_check_provenance_refuses_mismatch(self, day_config, tmp_path):
        design = grid_design(small_factors(), ["pv_scaling"], 2)
        run_campaign(design, day_config, parallelism=1, out_dir=tmp_path)
        doc = json.loads((tmp_path / "design.json").read_text())
        doc["config_hash"] = "deadbeefdeadbeef"
        (tmp_path / "design.json").write_text(json.dumps(doc))
        with pytest.raises(CampaignError, match="mismatch"):
            check_provenance(tmp_path)

    def test_config_hash_sensitive_to_any_field(self, day_config):
        from dataclasses import replace
        changed = replace(day_config,
                          tank=replace(day_config.tank, inner_diameter_m=5.0))
        assert config_hash(day_config) != config_hash(changed)

    def test_run_seed_is_stable_hash(self):
        assert derive_run_seed(42, 7) == derive_run_seed(42, 7)
        assert derive_run_seed(42, 7) != derive_run_seed(42, 8)
        assert derive_run_seed(42, 7) != derive_run_seed(43, 7)
