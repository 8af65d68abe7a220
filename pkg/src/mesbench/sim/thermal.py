"""Quasi-static district-heating branch.

Topology: external grid -> pipe0 -> node A (power-to-heat injection,
consumer 1) -> pipe1 -> node B (consumer 2, the critical node). pipe2 is the
shared return toward the external grid and enters the accounting as losses
plus a colder return arriving at the grid. Flows are demand-scheduled at the
nominal supply/return split; actual delivered temperatures follow from pipe
losses and the storage state, so a weak branch shows up as a depressed
critical-node temperature rather than as unserved flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..constants import WATER_CP_J_PER_KG_K as CP

__all__ = ["ThermalState", "pipe_outlet_temperature", "solve_thermal_branch"]


@dataclass(frozen=True)
class ThermalState:
    """Solved branch state for one step."""

    node_supply_temperatures_c: tuple[float, float]  # node A, node B
    pipe_mass_flows_kg_s: tuple[float, float, float]
    external_heat_kw: float
    tank_to_network_kw: float
    pipe_losses_kw: float
    consumer_heat_kw: tuple[float, float]

    @property
    def critical_temperature_c(self) -> float:
        return self.node_supply_temperatures_c[1]


def pipe_outlet_temperature(t_in_c: float, mdot_kg_s: float, length_m: float,
                            loss_w_per_m_k: float, t_ground_c: float) -> float:
    """Outlet temperature of a buried pipe with linear heat-loss coefficient.

    T_out = T_g + (T_in - T_g) * exp(-U' L / (mdot cp)); stagnant water
    (mdot = 0) relaxes fully to ground temperature.
    """
    if mdot_kg_s < 0:
        raise ValueError("mass flow must be non-negative")
    if length_m <= 0:
        raise ValueError("pipe length must be positive")
    if mdot_kg_s == 0.0:
        return t_ground_c
    return t_ground_c + (t_in_c - t_ground_c) * math.exp(
        -loss_w_per_m_k * length_m / (mdot_kg_s * CP)
    )


def solve_thermal_branch(demand_kw: tuple[float, float],
                         tank_stream_kg_s: float,
                         tank_stream_temp_c: float,
                         pipe_lengths_m: tuple[float, float, float],
                         loss_w_per_m_k: float,
                         t_ground_c: float,
                         t_supply_c: float,
                         t_return_c: float) -> ThermalState:
    """Solve node temperatures and the external draw for one step.

    Consumers draw their demand at flows sized for the nominal supply/return
    split. The power-to-heat stream (``tank_stream_kg_s`` at
    ``tank_stream_temp_c``) enters at node A and displaces external flow
    one-for-one; the external grid covers the residual flow through pipe0.
    """
    split = t_supply_c - t_return_c
    if split <= 0:
        raise ValueError("supply temperature must exceed return temperature")
    mdot1 = max(0.0, demand_kw[0]) * 1e3 / (CP * split)
    mdot2 = max(0.0, demand_kw[1]) * 1e3 / (CP * split)
    mdot_total = mdot1 + mdot2

    mdot_tank = min(tank_stream_kg_s, mdot_total)
    mdot_ext = mdot_total - mdot_tank

    t_pipe0_out = pipe_outlet_temperature(t_supply_c, mdot_ext, pipe_lengths_m[0],
                                          loss_w_per_m_k, t_ground_c)
    if mdot_total > 0.0:
        t_node_a = (mdot_ext * t_pipe0_out + mdot_tank * tank_stream_temp_c) / mdot_total
    else:
        t_node_a = t_ground_c
    t_node_b = pipe_outlet_temperature(t_node_a, mdot2, pipe_lengths_m[1],
                                       loss_w_per_m_k, t_ground_c)

    # Return path: only the external share travels pipe2 back to the grid;
    # the tank's share re-enters the storage locally at node A.
    t_return_at_grid = pipe_outlet_temperature(t_return_c, mdot_ext, pipe_lengths_m[2],
                                               loss_w_per_m_k, t_ground_c)

    loss0 = mdot_ext * CP * (t_supply_c - t_pipe0_out) / 1e3
    loss1 = mdot2 * CP * (t_node_a - t_node_b) / 1e3
    loss2 = mdot_ext * CP * (t_return_c - t_return_at_grid) / 1e3

    external_kw = mdot_ext * CP * (t_supply_c - t_return_at_grid) / 1e3
    tank_kw = mdot_tank * CP * (tank_stream_temp_c - t_return_c) / 1e3
    consumer1_kw = mdot1 * CP * (t_node_a - t_return_c) / 1e3
    consumer2_kw = mdot2 * CP * (t_node_b - t_return_c) / 1e3

    return ThermalState(
        node_supply_temperatures_c=(t_node_a, t_node_b),
        pipe_mass_flows_kg_s=(mdot_ext, mdot2, mdot_ext),
        external_heat_kw=external_kw,
        tank_to_network_kw=tank_kw,
        pipe_losses_kw=loss0 + loss1 + loss2,
        consumer_heat_kw=(consumer1_kw, consumer2_kw),
    )
