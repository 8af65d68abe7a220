"""Coupled time-series simulation of the benchmark.

Per step, in order: (1) read profiles; (2) controllers act on the previous
step's bus-1 voltage and the current tank temperatures (the one-step
measurement delay breaks the algebraic loop between domains); (3) heat pump
and tank update; (4) thermal branch solve, with the external grid covering
whatever the storage does not deliver; (5) electrical injections assembled
and the feeder solved. A run is strictly sequential and owns all its state;
independent runs can execute concurrently.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from ..constants import WATER_CP_J_PER_KG_K as CP
from ..control import (
    FlexHeatMode,
    FlexHeatState,
    VoltageControllerConfig,
    flex_heat_step,
    voltage_power_limit,
)
from ..scenario import BenchmarkConfig, Profiles, build_profiles
from .heatpump import heat_pump_step
from .powerflow import solve_radial_power_flow
from .tank import initial_tank_state, tank_step
from .thermal import solve_thermal_branch

__all__ = ["SimulationError", "Trajectory", "simulate", "trajectory_to_csv",
           "TRAJECTORY_COLUMNS"]

# Injection temperature must clear the condenser intake by this much for the
# charge flow to stay finite.
_MIN_CHARGE_DELTA_K = 5.0


class SimulationError(RuntimeError):
    """A solver failed mid-run; the message carries the step index."""


@dataclass
class Trajectory:
    """Per-step summaries of one simulation run.

    The documented CSV columns are the first fourteen fields; the remaining
    fields are diagnostics used by conservation checks and the metrics
    module.
    """

    step_s: float
    steps: list[int] = field(default_factory=list)
    v1_pu: list[float] = field(default_factory=list)
    v2_pu: list[float] = field(default_factory=list)
    line0_loading_pct: list[float] = field(default_factory=list)
    hp_p_el_kw: list[float] = field(default_factory=list)
    hp_q_th_kw: list[float] = field(default_factory=list)
    cop: list[float] = field(default_factory=list)
    tank_top_c: list[float] = field(default_factory=list)
    tank_bottom_c: list[float] = field(default_factory=list)
    t_critical_c: list[float] = field(default_factory=list)
    heat_ext_kw: list[float] = field(default_factory=list)
    pv_kw: list[float] = field(default_factory=list)
    export_kw: list[float] = field(default_factory=list)
    mode: list[str] = field(default_factory=list)
    # diagnostics
    slack_import_kw: list[float] = field(default_factory=list)
    el_losses_kw: list[float] = field(default_factory=list)
    el_residual_kw: list[float] = field(default_factory=list)
    el_max_term_kw: list[float] = field(default_factory=list)
    th_residual_kw: list[float] = field(default_factory=list)
    th_demand_kw: list[float] = field(default_factory=list)
    tank_residual_j: list[float] = field(default_factory=list)
    tank_throughput_j: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)


TRAJECTORY_COLUMNS = [
    "step", "V1_pu", "V2_pu", "line0_loading_pct", "hp_p_el_kw", "hp_q_th_kw",
    "cop", "tank_top_c", "tank_bottom_c", "t_critical_c", "heat_ext_kw",
    "pv_kw", "export_kw", "mode",
]


def trajectory_to_csv(trajectory: Trajectory, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for i in range(len(trajectory)):
            w.writerow([
                trajectory.steps[i],
                repr(trajectory.v1_pu[i]),
                repr(trajectory.v2_pu[i]),
                repr(trajectory.line0_loading_pct[i]),
                repr(trajectory.hp_p_el_kw[i]),
                repr(trajectory.hp_q_th_kw[i]),
                repr(trajectory.cop[i]),
                repr(trajectory.tank_top_c[i]),
                repr(trajectory.tank_bottom_c[i]),
                repr(trajectory.t_critical_c[i]),
                repr(trajectory.heat_ext_kw[i]),
                repr(trajectory.pv_kw[i]),
                repr(trajectory.export_kw[i]),
                trajectory.mode[i],
            ])


def simulate(config: BenchmarkConfig, profiles: Profiles | None = None) -> Trajectory:
    """Run the benchmark over the configured horizon.

    ``profiles`` overrides the config's profile source (used by the campaign
    runner to materialize them once per worker).
    """
    if profiles is None:
        profiles = build_profiles(config)
    n_steps = config.n_steps
    if len(profiles) < n_steps:
        raise ValueError(f"profiles provide {len(profiles)} steps, need {n_steps}")

    el = config.electrical
    th = config.thermal
    hp = config.heat_pump
    tank_cfg = config.tank
    ctl = config.control
    dt = config.step_s

    line_impedances = tuple(
        complex(el.r_ohm_per_km * l, el.x_ohm_per_km * l) for l in el.line_lengths_km
    )
    pipe_lengths_m = tuple(1e3 * l for l in th.pipe_lengths_km)
    pv_peak1 = el.pv_peak_bus1_kw * el.pv_scaling
    pv_peak2 = el.pv_peak_bus2_kw * el.pv_scaling
    nominal_split = th.supply_temperature_c - th.return_temperature_c

    vcfg = VoltageControllerConfig(ctl.kp_per_pu, ctl.v_ref_pu, hp.rated_power_kw)
    flex = FlexHeatState(
        mode=FlexHeatMode.GRID_ONLY,
        charge_start_c=ctl.charge_start_c,
        charge_stop_c=ctl.charge_stop_c,
        discharge_start_c=ctl.discharge_start_c,
        discharge_stop_c=ctl.discharge_stop_c,
        surplus_threshold_kw=ctl.surplus_threshold_kw,
    )
    tank = initial_tank_state(tank_cfg.inner_diameter_m, tank_cfg.height_m,
                              tank_cfg.layer_count, th.return_temperature_c)

    traj = Trajectory(step_s=dt)
    v1_prev = el.slack_voltage_pu
    surplus_prev = 0.0

    pv_series = profiles.pv_normalized
    el1_series, el2_series = profiles.load_el_kw
    th1_series, th2_series = profiles.heat_kw

    for i in range(n_steps):
        try:
            pv1 = pv_series[i] * pv_peak1
            pv2 = pv_series[i] * pv_peak2
            load1 = el1_series[i]
            load2 = el2_series[i]
            heat1 = th1_series[i]
            heat2 = th2_series[i]

            t_top = tank.top_c
            t_bottom = tank.bottom_c

            # Controllers see last step's voltage and surplus.
            if ctl.voltage_control_enabled:
                p_limit = voltage_power_limit(v1_prev, vcfg)
            else:
                p_limit = hp.rated_power_kw
            if ctl.flex_heat_enabled:
                flex, hp_setpoint, discharge_enable = flex_heat_step(
                    flex, t_top, t_bottom, surplus_prev, p_limit, hp.min_op_kw
                )
            else:
                hp_setpoint, discharge_enable = 0.0, False

            # Heat pump charges the storage from the bottom toward the
            # charge setpoint; COP follows the condenser-side water mean.
            if hp_setpoint > 0.0:
                sink_c = 0.5 * (t_bottom + tank_cfg.charge_setpoint_c)
                q_th, cop = heat_pump_step(hp_setpoint, hp.source_temperature_c,
                                           sink_c, hp)
                t_inject = max(tank_cfg.charge_setpoint_c,
                               t_bottom + _MIN_CHARGE_DELTA_K)
                mdot_charge = q_th * 1e3 / (CP * (t_inject - t_bottom))
            else:
                q_th, cop = 0.0, 0.0
                t_inject = tank_cfg.charge_setpoint_c
                mdot_charge = 0.0

            # Discharge serves the full demand flow through a tempering
            # valve: hot tank water blended down toward the discharge
            # setpoint with return water.
            mdot_demand = (heat1 + heat2) * 1e3 / (CP * nominal_split)
            mdot_discharge = 0.0
            if discharge_enable and mdot_demand > 0.0 and \
                    t_top > th.return_temperature_c + 0.5:
                if t_top > tank_cfg.discharge_setpoint_c:
                    ratio = (tank_cfg.discharge_setpoint_c - th.return_temperature_c) \
                        / (t_top - th.return_temperature_c)
                else:
                    ratio = 1.0
                mdot_discharge = mdot_demand * ratio

            tank, acct = tank_step(
                tank, mdot_charge, t_inject, mdot_discharge,
                th.return_temperature_c, th.ground_temperature_c,
                tank_cfg.ambient_loss_w_per_m2_k, dt,
            )

            # Stream handed to the network: tank outflow plus valve blend.
            if mdot_discharge > 0.0:
                t_blend = (mdot_discharge * acct.discharge_outlet_c
                           + (mdot_demand - mdot_discharge) * th.return_temperature_c
                           ) / mdot_demand
                stream_kg_s, stream_temp = mdot_demand, t_blend
            else:
                stream_kg_s, stream_temp = 0.0, th.return_temperature_c

            thermal = solve_thermal_branch(
                (heat1, heat2), stream_kg_s, stream_temp, pipe_lengths_m,
                th.pipe_loss_w_per_m_k, th.ground_temperature_c,
                th.supply_temperature_c, th.return_temperature_c,
            )

            electrical = solve_radial_power_flow(
                line_impedances,
                (complex((pv1 - load1) * 1e3, 0.0),
                 complex((pv2 - load2 - hp_setpoint) * 1e3, 0.0)),
                el.slack_voltage_pu, el.nominal_voltage_v,
            )
        except Exception as exc:
            raise SimulationError(f"step {i}: {exc}") from exc

        slack_kw = electrical.slack_exchange_kw
        net_injection_kw = (pv1 - load1) + (pv2 - load2 - hp_setpoint)
        el_residual = slack_kw + net_injection_kw - electrical.losses_kw
        el_max_term = max(abs(slack_kw), pv1 + pv2, load1 + load2, hp_setpoint,
                          electrical.losses_kw)
        th_residual = (thermal.external_heat_kw + thermal.tank_to_network_kw
                       - sum(thermal.consumer_heat_kw) - thermal.pipe_losses_kw)

        traj.steps.append(i)
        traj.v1_pu.append(electrical.v1_pu)
        traj.v2_pu.append(electrical.v2_pu)
        traj.line0_loading_pct.append(
            100.0 * electrical.line_flows_kva[0] / el.line_rating_kva)
        traj.hp_p_el_kw.append(hp_setpoint)
        traj.hp_q_th_kw.append(q_th)
        traj.cop.append(cop)
        traj.tank_top_c.append(tank.top_c)
        traj.tank_bottom_c.append(tank.bottom_c)
        traj.t_critical_c.append(thermal.critical_temperature_c)
        traj.heat_ext_kw.append(thermal.external_heat_kw)
        traj.pv_kw.append(pv1 + pv2)
        traj.export_kw.append(max(0.0, -slack_kw))
        traj.mode.append(flex.mode.value if ctl.flex_heat_enabled else
                         FlexHeatMode.GRID_ONLY.value)
        traj.slack_import_kw.append(slack_kw)
        traj.el_losses_kw.append(electrical.losses_kw)
        traj.el_residual_kw.append(el_residual)
        traj.el_max_term_kw.append(el_max_term)
        traj.th_residual_kw.append(th_residual)
        traj.th_demand_kw.append(sum(thermal.consumer_heat_kw))
        traj.tank_residual_j.append(acct.residual_j)
        traj.tank_throughput_j.append(acct.throughput_j)

        v1_prev = electrical.v1_pu
        surplus_prev = max(0.0, pv1 + pv2 - load1 - load2)

    return traj
