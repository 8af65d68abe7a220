"""Factors, recipes, benchmark configuration and the JSON/CSV exchange formats.

Experiment designs talk to the simulator exclusively through the file formats
defined here (factors.json, recipes.json, config.json, profiles.csv), so that
design generation, simulation and analysis stay decoupled.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

__all__ = [
    "Factor",
    "Recipe",
    "ElectricalParams",
    "ThermalParams",
    "HeatPumpParams",
    "TankParams",
    "ControlParams",
    "ProfilesConfig",
    "Profiles",
    "BenchmarkConfig",
    "FactorError",
    "UnknownFactorError",
    "FACTOR_BINDINGS",
    "default_factors",
    "baseline_config",
    "apply_recipe",
    "load_factors",
    "write_factors",
    "load_recipes",
    "read_recipes",
    "write_recipes",
    "load_config",
    "write_config",
    "build_profiles",
    "synthetic_profiles",
    "read_profiles_csv",
    "write_profiles_csv",
]


class FactorError(ValueError):
    """A factor or recipe failed validation."""


class UnknownFactorError(FactorError):
    """A recipe refers to a factor name with no config binding."""


@dataclass(frozen=True)
class Factor:
    """A named scalar knob with a variation range and a base value.

    ``kind`` separates design parameters (component sizing, controller gains)
    from scenario parameters (profile and rating scalings); it is
    informational and does not change how the factor is sampled.
    """

    name: str
    kind: str  # "design" | "scenario"
    min: float
    max: float
    base: float
    unit: str = ""

    def __post_init__(self):
        if self.kind not in ("design", "scenario"):
            raise FactorError(f"factor {self.name!r}: kind must be 'design' or 'scenario'")
        for label, v in (("min", self.min), ("max", self.max), ("base", self.base)):
            if not math.isfinite(v):
                raise FactorError(f"factor {self.name!r}: {label} is not finite")
        if not (self.min <= self.base <= self.max):
            raise FactorError(
                f"factor {self.name!r}: requires min <= base <= max, "
                f"got min={self.min}, base={self.base}, max={self.max}"
            )


@dataclass(frozen=True)
class Recipe:
    """One concrete factor-value assignment defining a single simulation run."""

    run_id: int
    assignments: dict[str, float]
    design_tag: str = ""

    def __post_init__(self):
        if self.run_id < 0:
            raise FactorError(f"recipe run_id must be non-negative, got {self.run_id}")


def validate_factor_set(factors: list[Factor]) -> None:
    seen = set()
    for f in factors:
        if f.name in seen:
            raise FactorError(f"duplicate factor name {f.name!r}")
        seen.add(f.name)


def validate_recipe(recipe: Recipe, factors: list[Factor]) -> None:
    """Check every assigned value against its factor's closed range."""
    by_name = {f.name: f for f in factors}
    for name, value in recipe.assignments.items():
        f = by_name.get(name)
        if f is None:
            raise UnknownFactorError(f"recipe {recipe.run_id}: unknown factor {name!r}")
        if not (f.min <= value <= f.max):
            raise FactorError(
                f"recipe {recipe.run_id}: {name}={value} outside [{f.min}, {f.max}]"
            )


# --------------------------------------------------------------------------
# Benchmark configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ElectricalParams:
    """Radial LV feeder: slack bus 0 -- line 0 -- bus 1 -- line 1 -- bus 2.

    Consumer 1 and the large PV plant sit at bus 1; consumer 2, the small PV
    plant and the heat pump sit at bus 2 (feeder end, highest voltage
    sensitivity).
    """

    line_lengths_km: tuple[float, float] = (0.3, 0.3)
    r_ohm_per_km: float = 0.208
    x_ohm_per_km: float = 0.080
    line_rating_kva: float = 250.0
    slack_voltage_pu: float = 1.0
    nominal_voltage_v: float = 400.0
    pv_peak_bus1_kw: float = 150.0
    pv_peak_bus2_kw: float = 50.0
    pv_scaling: float = 1.0


@dataclass(frozen=True)
class ThermalParams:
    """District-heating branch: grid -> pipe0 -> node A -> pipe1 -> node B.

    The power-to-heat facility and consumer 1 connect at node A; consumer 2
    at node B is the critical (coldest) node. pipe2 is the common return and
    enters the loss accounting only.
    """

    pipe_lengths_km: tuple[float, float, float] = (0.5, 0.5, 0.5)
    pipe_loss_w_per_m_k: float = 0.25
    ground_temperature_c: float = 10.0
    supply_temperature_c: float = 75.0
    return_temperature_c: float = 45.0


@dataclass(frozen=True)
class HeatPumpParams:
    rated_power_kw: float = 100.0
    min_op_kw: float = 20.0
    carnot_efficiency: float = 0.45
    pinch_evaporator_k: float = 5.0
    pinch_condenser_k: float = 5.0
    source_temperature_c: float = 10.0


@dataclass(frozen=True)
class TankParams:
    """Stratified hot-water tank; volume is always pi*(d/2)^2*h, never stored."""

    inner_diameter_m: float = 4.0
    height_m: float = 7.9
    layer_count: int = 10
    ambient_loss_w_per_m2_k: float = 0.5
    charge_setpoint_c: float = 75.0
    discharge_setpoint_c: float = 70.0

    def volume_m3(self) -> float:
        return math.pi * (self.inner_diameter_m / 2.0) ** 2 * self.height_m


@dataclass(frozen=True)
class ControlParams:
    kp_per_pu: float = 20.0
    v_ref_pu: float = 0.96
    charge_start_c: float = 55.0
    charge_stop_c: float = 70.0
    discharge_start_c: float = 70.0
    discharge_stop_c: float = 60.0
    surplus_threshold_kw: float = 20.0
    voltage_control_enabled: bool = True
    flex_heat_enabled: bool = True


@dataclass(frozen=True)
class ProfilesConfig:
    """Where the run's time series come from.

    ``synthetic`` builds a seeded deterministic week (diurnal PV, double-peak
    residential electrical load, temperature-driven heat load); ``csv`` reads
    the documented profiles.csv format. The scaling knobs multiply whole
    series and are the binding targets of the scaling factors.
    """

    kind: str = "synthetic"  # "synthetic" | "csv"
    csv_path: str = ""
    seed: int = 42
    load_scaling: float = 1.0
    heat_scaling: float = 1.0


@dataclass(frozen=True)
class Profiles:
    """Per-step series; pv is a normalized fraction of peak, loads are kW."""

    timestamps_s: tuple[float, ...]
    pv_normalized: tuple[float, ...]
    load_el_kw: tuple[tuple[float, ...], tuple[float, ...]]
    heat_kw: tuple[tuple[float, ...], tuple[float, ...]]

    def __post_init__(self):
        n = len(self.timestamps_s)
        series = [self.pv_normalized, *self.load_el_kw, *self.heat_kw]
        if any(len(s) != n for s in series):
            raise ValueError("all profile series must have equal length")
        if any(not (0.0 <= v <= 1.0) for v in self.pv_normalized):
            raise ValueError("pv_normalized values must lie in [0, 1]")
        if any(v < 0.0 for s in (*self.load_el_kw, *self.heat_kw) for v in s):
            raise ValueError("load series must be non-negative")

    def __len__(self) -> int:
        return len(self.timestamps_s)


@dataclass(frozen=True)
class BenchmarkConfig:
    electrical: ElectricalParams = field(default_factory=ElectricalParams)
    thermal: ThermalParams = field(default_factory=ThermalParams)
    heat_pump: HeatPumpParams = field(default_factory=HeatPumpParams)
    tank: TankParams = field(default_factory=TankParams)
    control: ControlParams = field(default_factory=ControlParams)
    profiles: ProfilesConfig = field(default_factory=ProfilesConfig)
    horizon_s: float = 7 * 24 * 3600.0
    step_s: float = 900.0
    seed: int = 42

    def __post_init__(self):
        if self.step_s <= 0 or self.horizon_s <= 0:
            raise ValueError("horizon and step must be positive")
        n = self.horizon_s / self.step_s
        if abs(n - round(n)) > 1e-9:
            raise ValueError("step must divide horizon")
        for v in (*self.electrical.line_lengths_km, *self.thermal.pipe_lengths_km,
                  self.heat_pump.rated_power_kw, self.tank.inner_diameter_m,
                  self.tank.height_m):
            if v <= 0:
                raise ValueError("lengths, powers and diameters must be strictly positive")
        if self.tank.layer_count <= 0:
            raise ValueError("tank layer count must be strictly positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon_s / self.step_s))


def baseline_config(**overrides) -> BenchmarkConfig:
    """The benchmark with its documented default parameters."""
    return BenchmarkConfig(**overrides)


# --------------------------------------------------------------------------
# Factor catalog: fixed name -> config binding table
# --------------------------------------------------------------------------

def _set_pv_scaling(cfg: BenchmarkConfig, v: float) -> BenchmarkConfig:
    return replace(cfg, electrical=replace(cfg.electrical, pv_scaling=v))


def _set_heat_scaling(cfg: BenchmarkConfig, v: float) -> BenchmarkConfig:
    return replace(cfg, profiles=replace(cfg.profiles, heat_scaling=v))


def _set_load_scaling(cfg: BenchmarkConfig, v: float) -> BenchmarkConfig:
    return replace(cfg, profiles=replace(cfg.profiles, load_scaling=v))


def _set_hp_power(cfg: BenchmarkConfig, v: float) -> BenchmarkConfig:
    return replace(cfg, heat_pump=replace(cfg.heat_pump, rated_power_kw=v))


def _set_hp_min_op(cfg: BenchmarkConfig, v: float) -> BenchmarkConfig:
    return replace(cfg, heat_pump=replace(cfg.heat_pump, min_op_kw=v))


def _set_tank_diameter(cfg: BenchmarkConfig, v: float) -> BenchmarkConfig:
    return replace(cfg, tank=replace(cfg.tank, inner_diameter_m=v))


def _set_kp(cfg: BenchmarkConfig, v: float) -> BenchmarkConfig:
    return replace(cfg, control=replace(cfg.control, kp_per_pu=v))


# Recipes may only refer to these names; each entry sets one config knob, so
# applying the same recipe twice is a no-op (idempotence).
FACTOR_BINDINGS = {
    "pv_scaling": _set_pv_scaling,
    "heat_profile_scaling": _set_heat_scaling,
    "load_scaling": _set_load_scaling,
    "hp_power": _set_hp_power,
    "hp_min_op": _set_hp_min_op,
    "hwt_inner_diameter": _set_tank_diameter,
    "kp": _set_kp,
}


def default_factors() -> list[Factor]:
    """The seven screening factors with their default ranges.

    Diameter spans 1-8 m; the remaining ranges are engineering defaults
    (see README).
    """
    return [
        Factor("hwt_inner_diameter", "design", 1.0, 8.0, 4.0, "m"),
        Factor("hp_min_op", "design", 0.0, 50.0, 20.0, "kW"),
        Factor("kp", "design", 0.0, 40.0, 20.0, "1/pu"),
        Factor("pv_scaling", "scenario", 0.5, 2.0, 1.0, "-"),
        Factor("heat_profile_scaling", "scenario", 0.5, 2.0, 1.0, "-"),
        Factor("load_scaling", "scenario", 0.5, 2.0, 1.0, "-"),
        Factor("hp_power", "scenario", 50.0, 200.0, 100.0, "kW"),
    ]


def apply_recipe(config: BenchmarkConfig, recipe: Recipe) -> BenchmarkConfig:
    """Return a new config with the recipe's assignments applied.

    Unknown factor names raise; untouched fields are identical to the input.
    """
    cfg = config
    for name, value in recipe.assignments.items():
        setter = FACTOR_BINDINGS.get(name)
        if setter is None:
            raise UnknownFactorError(
                f"unknown factor {name!r}; known factors: {sorted(FACTOR_BINDINGS)}"
            )
        cfg = setter(cfg, float(value))
    return cfg


# --------------------------------------------------------------------------
# JSON exchange formats
# --------------------------------------------------------------------------

def write_factors(factors: list[Factor], path: str | Path) -> None:
    validate_factor_set(factors)
    rows = [asdict(f) for f in factors]
    Path(path).write_text(json.dumps(rows, indent=2, allow_nan=False) + "\n")


def load_factors(path: str | Path) -> list[Factor]:
    """Read factors.json; rejects duplicates and inverted ranges."""
    rows = json.loads(Path(path).read_text())
    if not isinstance(rows, list):
        raise FactorError(f"{path}: expected a JSON array of factors")
    factors = [Factor(**row) for row in rows]
    validate_factor_set(factors)
    return factors


def write_recipes(recipes: list[Recipe], path: str | Path) -> None:
    rows = [
        {"run_id": r.run_id, "design_tag": r.design_tag, "assignments": r.assignments}
        for r in recipes
    ]
    Path(path).write_text(json.dumps(rows, indent=2, allow_nan=False) + "\n")


def read_recipes(path: str | Path) -> list[Recipe]:
    rows = json.loads(Path(path).read_text())
    return [
        Recipe(
            run_id=row["run_id"],
            assignments={k: float(v) for k, v in row["assignments"].items()},
            design_tag=row.get("design_tag", ""),
        )
        for row in rows
    ]


# Alias mirroring write_recipes naming in docs and the CLI.
load_recipes = read_recipes


def write_config(config: BenchmarkConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(asdict(config), indent=2, allow_nan=False) + "\n")


def _tupled(d: dict, keys: tuple[str, ...]) -> dict:
    return {k: (tuple(v) if k in keys else v) for k, v in d.items()}


def load_config(path: str | Path) -> BenchmarkConfig:
    raw = json.loads(Path(path).read_text())
    return BenchmarkConfig(
        electrical=ElectricalParams(**_tupled(raw["electrical"], ("line_lengths_km",))),
        thermal=ThermalParams(**_tupled(raw["thermal"], ("pipe_lengths_km",))),
        heat_pump=HeatPumpParams(**raw["heat_pump"]),
        tank=TankParams(**raw["tank"]),
        control=ControlParams(**raw["control"]),
        profiles=ProfilesConfig(**raw["profiles"]),
        horizon_s=raw["horizon_s"],
        step_s=raw["step_s"],
        seed=raw["seed"],
    )


# --------------------------------------------------------------------------
# Profiles: seeded synthetic default and CSV time series
# --------------------------------------------------------------------------

def _lcg_noise(seed: int, n: int, amplitude: float) -> list[float]:
    """Deterministic noise in [-amplitude, amplitude] from a 64-bit LCG.

    Kept library-free so profile bytes never depend on numpy's RNG stream.
    """
    state = (seed ^ 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    out = []
    for _ in range(n):
        state = (state * 6364136223846793005 + 1442695040888963407) & 0xFFFFFFFFFFFFFFFF
        u = (state >> 11) / float(1 << 53)
        out.append((2.0 * u - 1.0) * amplitude)
    return out


def synthetic_profiles(n_steps: int, step_s: float, seed: int = 42,
                       load_scaling: float = 1.0, heat_scaling: float = 1.0) -> Profiles:
    """Deterministic one-or-more-day synthetic week.

    PV: clear-sky diurnal arc clipped at zero with mild seeded variability.
    Electrical load: residential double peak (morning/evening) per consumer.
    Heat load: ambient-temperature-driven space heating plus morning/evening
    draw peaks, floored above zero so the heating branch never stagnates.
    """
    pv_noise = _lcg_noise(seed, n_steps, 0.04)
    el1_noise = _lcg_noise(seed + 1, n_steps, 0.06)
    el2_noise = _lcg_noise(seed + 2, n_steps, 0.06)
    th1_noise = _lcg_noise(seed + 3, n_steps, 0.06)
    th2_noise = _lcg_noise(seed + 4, n_steps, 0.06)

    timestamps, pv, el1, el2, th1, th2 = [], [], [], [], [], []
    for i in range(n_steps):
        t = i * step_s
        hour = (t / 3600.0) % 24.0
        day = int(t // 86400)

        # PV: sun up 6h-18h, slight day-to-day variability.
        sun = math.sin(math.pi * (hour - 6.0) / 12.0) if 6.0 <= hour <= 18.0 else 0.0
        day_factor = 0.9 + 0.1 * math.cos(2.0 * math.pi * day / 7.0)
        pv_v = max(0.0, min(1.0, sun ** 1.2 * day_factor * (1.0 + pv_noise[i])))

        # Electrical load: base + morning and evening peaks, kW per consumer.
        morning = math.exp(-((hour - 7.5) ** 2) / 2.0)
        evening = math.exp(-((hour - 19.0) ** 2) / 4.5)
        shape = 0.35 + 0.8 * morning + 1.0 * evening
        el1_v = max(0.0, 9.0 * shape * (1.0 + el1_noise[i]) * load_scaling)
        el2_v = max(0.0, 7.0 * shape * (1.0 + el2_noise[i]) * load_scaling)

        # Heat load: cold nights drive space heating; draw peaks at 7h and 19h.
        ambient = 8.0 + 6.0 * math.sin(2.0 * math.pi * (hour - 14.0) / 24.0)
        space = max(0.0, 17.0 - ambient) * 1.1
        draw = 5.0 * math.exp(-((hour - 7.0) ** 2) / 1.5) + 4.0 * math.exp(-((hour - 19.5) ** 2) / 2.0)
        th_shape = 4.0 + space + draw
        th1_v = max(0.0, th_shape * (1.0 + th1_noise[i]) * heat_scaling)
        th2_v = max(0.0, 0.85 * th_shape * (1.0 + th2_noise[i]) * heat_scaling)

        timestamps.append(t)
        pv.append(pv_v)
        el1.append(el1_v)
        el2.append(el2_v)
        th1.append(th1_v)
        th2.append(th2_v)

    return Profiles(
        timestamps_s=tuple(timestamps),
        pv_normalized=tuple(pv),
        load_el_kw=(tuple(el1), tuple(el2)),
        heat_kw=(tuple(th1), tuple(th2)),
    )


PROFILES_CSV_HEADER = ["timestamp", "pv", "load_el_1", "load_el_2", "load_th_1", "load_th_2"]


def write_profiles_csv(profiles: Profiles, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PROFILES_CSV_HEADER)
        for i in range(len(profiles)):
            w.writerow([
                repr(float(profiles.timestamps_s[i])),
                repr(float(profiles.pv_normalized[i])),
                repr(float(profiles.load_el_kw[0][i])),
                repr(float(profiles.load_el_kw[1][i])),
                repr(float(profiles.heat_kw[0][i])),
                repr(float(profiles.heat_kw[1][i])),
            ])


def read_profiles_csv(path: str | Path) -> Profiles:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != PROFILES_CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(PROFILES_CSV_HEADER)}")
        cols: list[list[float]] = [[] for _ in PROFILES_CSV_HEADER]
        for row in reader:
            for c, v in zip(cols, row):
                c.append(float(v))
    return Profiles(
        timestamps_s=tuple(cols[0]),
        pv_normalized=tuple(cols[1]),
        load_el_kw=(tuple(cols[2]), tuple(cols[3])),
        heat_kw=(tuple(cols[4]), tuple(cols[5])),
    )


def _scaled(series: tuple[float, ...], factor: float) -> tuple[float, ...]:
    return series if factor == 1.0 else tuple(v * factor for v in series)


def build_profiles(config: BenchmarkConfig) -> Profiles:
    """Materialize the run's profiles with the config's scalings applied."""
    pc = config.profiles
    if pc.kind == "synthetic":
        return synthetic_profiles(config.n_steps, config.step_s, seed=pc.seed,
                                  load_scaling=pc.load_scaling, heat_scaling=pc.heat_scaling)
    if pc.kind == "csv":
        raw = read_profiles_csv(pc.csv_path)
        if len(raw) < config.n_steps:
            raise ValueError(
                f"profiles {pc.csv_path}: {len(raw)} rows < {config.n_steps} steps"
            )
        n = config.n_steps
        return Profiles(
            timestamps_s=raw.timestamps_s[:n],
            pv_normalized=raw.pv_normalized[:n],
            load_el_kw=(
                _scaled(raw.load_el_kw[0][:n], pc.load_scaling),
                _scaled(raw.load_el_kw[1][:n], pc.load_scaling),
            ),
            heat_kw=(
                _scaled(raw.heat_kw[0][:n], pc.heat_scaling),
                _scaled(raw.heat_kw[1][:n], pc.heat_scaling),
            ),
        )
    raise ValueError(f"unknown profiles kind {pc.kind!r}")
