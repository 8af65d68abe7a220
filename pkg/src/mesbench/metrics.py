"""The six target metrics computed from one trajectory.

Self-consumption counts PV energy not exported at the slack (the standard
local-energy-community definition); the heat pump's average COP is
energy-weighted over its on-periods, which is robust to on/off cycling.
Energies are reported in MWh.
"""

from __future__ import annotations

from dataclasses import dataclass

from .sim.engine import Trajectory

__all__ = ["MetricSet", "compute_metrics", "METRIC_NAMES"]

# Ranking and analysis iterate the six core metrics in this order.
METRIC_NAMES = [
    "max_voltage_bus2",
    "max_line_loading_line0",
    "hp_average_cop",
    "self_consumption_mwh",
    "min_supply_temperature",
    "imported_heat_mwh",
]


@dataclass(frozen=True)
class MetricSet:
    max_voltage_bus2: float          # p.u.
    max_line_loading_line0: float    # %
    hp_average_cop: float
    self_consumption_mwh: float
    self_consumption_pct: float
    min_supply_temperature: float    # degC
    imported_heat_mwh: float

    def as_dict(self) -> dict[str, float]:
        return {
            "max_voltage_bus2": self.max_voltage_bus2,
            "max_line_loading_line0": self.max_line_loading_line0,
            "hp_average_cop": self.hp_average_cop,
            "self_consumption_mwh": self.self_consumption_mwh,
            "self_consumption_pct": self.self_consumption_pct,
            "min_supply_temperature": self.min_supply_temperature,
            "imported_heat_mwh": self.imported_heat_mwh,
        }


def compute_metrics(trajectory: Trajectory, dt_s: float | None = None) -> MetricSet:
    """Reduce a trajectory to the target metrics.

    Raises on an empty trajectory. ``dt_s`` defaults to the trajectory's own
    step length.
    """
    n = len(trajectory)
    if n == 0:
        raise ValueError("cannot compute metrics of an empty trajectory")
    dt_h = (dt_s if dt_s is not None else trajectory.step_s) / 3600.0

    e_th_kwh = 0.0
    e_el_kwh = 0.0
    for p, q in zip(trajectory.hp_p_el_kw, trajectory.hp_q_th_kw):
        if p > 0.0:
            e_el_kwh += p * dt_h
            e_th_kwh += q * dt_h
    avg_cop = e_th_kwh / e_el_kwh if e_el_kwh > 0.0 else 0.0

    pv_kwh = sum(trajectory.pv_kw) * dt_h
    export_kwh = sum(trajectory.export_kw) * dt_h
    self_cons_kwh = sum(
        pv - ex for pv, ex in zip(trajectory.pv_kw, trajectory.export_kw)
    ) * dt_h
    self_cons_pct = 100.0 * self_cons_kwh / pv_kwh if pv_kwh > 0.0 else 100.0

    imported_heat_kwh = sum(max(0.0, q) for q in trajectory.heat_ext_kw) * dt_h

    return MetricSet(
        max_voltage_bus2=max(trajectory.v2_pu),
        max_line_loading_line0=max(trajectory.line0_loading_pct),
        hp_average_cop=avg_cop,
        self_consumption_mwh=self_cons_kwh / 1e3,
        self_consumption_pct=self_cons_pct,
        min_supply_temperature=min(trajectory.t_critical_c),
        imported_heat_mwh=imported_heat_kwh / 1e3,
    )
