"""Campaign execution: run a design against the simulator and persist results.

Runs are independent; a work pool executes them in any order and the results
CSV is assembled run_id-ordered afterwards, so output bytes do not depend on
worker count or scheduling. Each run leaves a self-contained record under
runs/, which doubles as the resume journal: re-invoking a campaign skips
run_ids whose record already exists.
"""

from __future__ import annotations

import csv
import hashlib
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .metrics import MetricSet, compute_metrics
from .sampling import CampaignDesign
from .scenario import BenchmarkConfig, Recipe, apply_recipe, write_recipes
from .sim import simulate, trajectory_to_csv

__all__ = [
    "CampaignError",
    "CampaignResult",
    "run_campaign",
    "execute_single_run",
    "config_hash",
    "derive_run_seed",
    "read_results_csv",
    "RESULTS_COLUMNS_FIXED",
]

RESULTS_COLUMNS_FIXED = [
    "max_v2_pu", "max_line0_pct", "avg_cop", "self_cons_mwh",
    "self_cons_pct", "min_tsupply_c", "heat_import_mwh",
]

_METRIC_TO_COLUMN = {
    "max_v2_pu": "max_voltage_bus2",
    "max_line0_pct": "max_line_loading_line0",
    "avg_cop": "hp_average_cop",
    "self_cons_mwh": "self_consumption_mwh",
    "self_cons_pct": "self_consumption_pct",
    "min_tsupply_c": "min_supply_temperature",
    "heat_import_mwh": "imported_heat_mwh",
}


class CampaignError(RuntimeError):
    pass


@dataclass(frozen=True)
class CampaignResult:
    design_kind: str
    meta: dict
    statuses: dict[int, str]          # run_id -> "ok" | "failed: <reason>"
    metrics: dict[int, MetricSet]     # present iff status ok
    config_hash: str
    seed: int
    out_dir: Path

    @property
    def n_ok(self) -> int:
        return sum(1 for s in self.statuses.values() if s == "ok")


def config_hash(config: BenchmarkConfig) -> str:
    canonical = json.dumps(asdict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def derive_run_seed(campaign_seed: int, run_id: int) -> int:
    """Stable per-run seed, independent of execution order."""
    digest = hashlib.sha256(f"{campaign_seed}:{run_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _run_record_path(out_dir: Path, run_id: int) -> Path:
    return out_dir / "runs" / f"run_{run_id:05d}.json"


def execute_single_run(base_config: BenchmarkConfig, recipe: Recipe,
                       out_dir: str | Path, campaign_seed: int) -> dict:
    """Apply one recipe, simulate, and persist the trajectory and record.

    Returns the per-run record dict. Failures are captured in the record,
    not raised, so a campaign continues past bad recipes.
    """
    out_dir = Path(out_dir)
    record: dict = {
        "run_id": recipe.run_id,
        "design_tag": recipe.design_tag,
        "assignments": recipe.assignments,
        "run_seed": derive_run_seed(campaign_seed, recipe.run_id),
    }
    try:
        config = apply_recipe(base_config, recipe)
        trajectory = simulate(config)
        metrics = compute_metrics(trajectory)
        trajectory_to_csv(trajectory, out_dir / "runs" / f"run_{recipe.run_id:05d}.csv")
        record["status"] = "ok"
        record["metrics"] = metrics.as_dict()
    except Exception as exc:
        record["status"] = f"failed: {exc}"

    path = _run_record_path(out_dir, recipe.run_id)
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(record, indent=2) + "\n")
    tmp.replace(path)
    return record


def _load_existing_record(out_dir: Path, run_id: int) -> dict | None:
    path = _run_record_path(out_dir, run_id)
    if not path.exists():
        return None
    try:
        record = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    if record.get("run_id") != run_id or "status" not in record:
        return None
    return record


def run_campaign(design: CampaignDesign, base_config: BenchmarkConfig,
                 parallelism: int = 1, out_dir: str | Path = "campaign_out") -> CampaignResult:
    """Execute every recipe of a design and aggregate the results CSV.

    Deterministic for any parallelism level; completed runs found under
    runs/ are skipped (resume). Failed runs are recorded and the campaign
    continues.
    """
    if parallelism < 1:
        raise CampaignError("parallelism must be >= 1")
    out_dir = Path(out_dir)
    (out_dir / "runs").mkdir(parents=True, exist_ok=True)

    seen = set()
    for r in design.recipes:
        if r.run_id in seen:
            raise CampaignError(f"design has duplicate run_id {r.run_id}")
        seen.add(r.run_id)

    chash = config_hash(base_config)
    seed = base_config.seed
    design_doc = {
        "kind": design.kind,
        "meta": design.meta,
        "config_hash": chash,
        "seed": seed,
        "tool_version": __version__,
        "n_runs": len(design),
    }
    (out_dir / "design.json").write_text(json.dumps(design_doc, indent=2) + "\n")
    write_recipes(list(design.recipes), out_dir / "recipes.json")

    records: dict[int, dict] = {}
    pending: list[Recipe] = []
    for recipe in design.recipes:
        existing = _load_existing_record(out_dir, recipe.run_id)
        if existing is not None:
            records[recipe.run_id] = existing
        else:
            pending.append(recipe)

    if pending:
        if parallelism == 1:
            for recipe in pending:
                records[recipe.run_id] = execute_single_run(
                    base_config, recipe, out_dir, seed)
        else:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                futures = [
                    pool.submit(execute_single_run, base_config, recipe, out_dir, seed)
                    for recipe in pending
                ]
                for future in futures:
                    record = future.result()
                    records[record["run_id"]] = record

    statuses: dict[int, str] = {}
    metric_sets: dict[int, MetricSet] = {}
    for run_id in sorted(records):
        record = records[run_id]
        statuses[run_id] = record["status"]
        if record["status"] == "ok":
            metric_sets[run_id] = MetricSet(**record["metrics"])
        else:
            warnings.warn(f"run {run_id} {record['status']}")

    factor_names = list(design.meta.get("factors", []))
    _write_results_csv(out_dir / "results.csv", design, records, factor_names,
                       chash, seed)

    return CampaignResult(
        design_kind=design.kind,
        meta=design.meta,
        statuses=statuses,
        metrics=metric_sets,
        config_hash=chash,
        seed=seed,
        out_dir=out_dir,
    )


def _write_results_csv(path: Path, design: CampaignDesign, records: dict[int, dict],
                       factor_names: list[str], chash: str, seed: int) -> None:
    header_comment = (f"# config_hash={chash} seed={seed} "
                      f"tool=mesbench-{__version__} design={design.kind}")
    with open(path, "w", newline="") as fh:
        fh.write(header_comment + "\n")
        w = csv.writer(fh)
        w.writerow(["run_id", *factor_names, *RESULTS_COLUMNS_FIXED])
        for run_id in sorted(records):
            record = records[run_id]
            assignments = record["assignments"]
            row: list = [run_id]
            row += [repr(float(assignments[n])) if n in assignments else ""
                    for n in factor_names]
            if record["status"] == "ok":
                m = record["metrics"]
                row += [repr(float(m[_METRIC_TO_COLUMN[c]])) for c in RESULTS_COLUMNS_FIXED]
            else:
                row += [""] * len(RESULTS_COLUMNS_FIXED)
            w.writerow(row)


def read_results_csv(path: str | Path) -> tuple[dict, list[dict]]:
    """Parse results.csv into (provenance header, row dicts).

    Metric cells of failed runs come back as None.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("#"):
            raise CampaignError(f"{path}: missing provenance header line")
        provenance = dict(
            item.split("=", 1) for item in first.lstrip("# ").split() if "=" in item
        )
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            row: dict = {"run_id": int(raw["run_id"])}
            for key, value in raw.items():
                if key == "run_id":
                    continue
                row[key] = float(value) if value not in ("", None) else None
            rows.append(row)
    return provenance, rows


def check_provenance(out_dir: str | Path) -> dict:
    """Cross-check results.csv against design.json; returns the design doc.

    Refuses to hand out data whose config hash disagrees between the two
    files (results produced by a different configuration).
    """
    out_dir = Path(out_dir)
    design_doc = json.loads((out_dir / "design.json").read_text())
    provenance, _ = read_results_csv(out_dir / "results.csv")
    if provenance.get("config_hash") != design_doc.get("config_hash"):
        raise CampaignError(
            f"config hash mismatch between results.csv "
            f"({provenance.get('config_hash')}) and design.json "
            f"({design_doc.get('config_hash')}); refusing to analyze"
        )
    return design_doc
