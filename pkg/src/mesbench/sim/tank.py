"""One-dimensional stratified hot-water tank.

Layer 0 is the top. Charging injects hot water at the top and expels an equal
flow at the bottom (toward the heat-pump condenser intake); discharging draws
from the top and returns network water at the bottom. Both are plug-flow
shifts; inter-layer conduction and ambient losses are integrated with the
same explicit sub-steps, and buoyancy inversions are mixed away so the
profile stays monotone top-down. All exchanges are tallied so the step's
energy balance closes to rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..constants import (
    WATER_CP_J_PER_KG_K as CP,
    WATER_K_W_PER_M_K as K_WATER,
    WATER_RHO_KG_PER_M3 as RHO,
)

__all__ = ["TankState", "TankStepAccounting", "initial_tank_state", "tank_step"]

_MAX_SHIFT_FRACTION = 0.5  # layer volumes moved per sub-step
_MIN_SUBSTEP_S = 1e-3


@dataclass(frozen=True)
class TankState:
    """Layer temperatures (index 0 = top) plus geometry."""

    layer_temperatures_c: tuple[float, ...]
    diameter_m: float
    height_m: float

    @property
    def top_c(self) -> float:
        return self.layer_temperatures_c[0]

    @property
    def bottom_c(self) -> float:
        return self.layer_temperatures_c[-1]

    @property
    def volume_m3(self) -> float:
        return math.pi * (self.diameter_m / 2.0) ** 2 * self.height_m

    def stored_energy_j(self, reference_c: float = 0.0) -> float:
        m_layer = RHO * self.volume_m3 / len(self.layer_temperatures_c)
        return sum((t - reference_c) * m_layer * CP for t in self.layer_temperatures_c)


@dataclass(frozen=True)
class TankStepAccounting:
    """Energy bookkeeping for one tank_step call (all in joules).

    Outlet temperatures are flow-weighted averages over the sub-steps; the
    engine uses them so downstream balances see what the tank actually
    delivered.
    """

    energy_in_j: float
    energy_out_j: float
    loss_j: float
    stored_delta_j: float
    charge_outlet_c: float
    discharge_outlet_c: float

    @property
    def residual_j(self) -> float:
        return self.stored_delta_j - (self.energy_in_j - self.energy_out_j - self.loss_j)

    @property
    def throughput_j(self) -> float:
        return self.energy_in_j + self.energy_out_j + self.loss_j


def initial_tank_state(diameter_m: float, height_m: float, layer_count: int,
                       temperature_c: float) -> TankState:
    return TankState((float(temperature_c),) * layer_count, diameter_m, height_m)


def _mix_inversions(temps: list[float]) -> None:
    """Restore a monotone non-increasing profile by merging unstable runs."""
    n = len(temps)
    i = 0
    while i < n - 1:
        if temps[i] < temps[i + 1] - 1e-12:
            # Mix the inversion into a block average, then look upward in
            # case the mixed block is now colder than the layer above.
            j = i + 1
            total = temps[i] + temps[i + 1]
            count = 2
            while j + 1 < n and total / count < temps[j + 1] - 1e-12:
                j += 1
                total += temps[j]
                count += 1
            avg = total / count
            start = i
            while start > 0 and temps[start - 1] < avg - 1e-12:
                start -= 1
                total += temps[start]
                count += 1
                avg = total / count
            for idx in range(start, start + count):
                temps[idx] = avg
            i = max(start - 1, 0)
        else:
            i += 1


def tank_step(state: TankState, charge_kg_s: float, charge_temp_c: float,
              discharge_kg_s: float, return_temp_c: float, ambient_c: float,
              loss_w_per_m2_k: float, dt_s: float) -> tuple[TankState, TankStepAccounting]:
    """Advance the tank by one step.

    charge = (mass flow, injection temperature) entering at the top;
    discharge = mass flow drawn from the top with ``return_temp_c`` water
    entering at the bottom. Sub-steps are chosen so no more than half a layer
    volume moves per sub-step; below the 1 ms floor the step errors out.
    """
    if charge_kg_s < 0 or discharge_kg_s < 0:
        raise ValueError("flows must be non-negative")
    if dt_s <= 0:
        raise ValueError("dt must be positive")

    n = len(state.layer_temperatures_c)
    volume = state.volume_m3
    layer_mass = RHO * volume / n
    max_flow = max(charge_kg_s, discharge_kg_s)

    n_sub = 1
    if max_flow > 0:
        n_sub = max(1, math.ceil(max_flow * dt_s / (layer_mass * _MAX_SHIFT_FRACTION)))
    sub_dt = dt_s / n_sub
    if sub_dt < _MIN_SUBSTEP_S:
        raise ValueError(
            f"tank sub-step {sub_dt:.2e} s fell below {_MIN_SUBSTEP_S} s; "
            "flow is implausibly large for this tank"
        )

    height_per_layer = state.height_m / n
    area_cross = math.pi * (state.diameter_m / 2.0) ** 2
    area_side = math.pi * state.diameter_m * height_per_layer
    cond_coupling = K_WATER * area_cross / height_per_layer  # W/K between layers

    temps = list(state.layer_temperatures_c)
    e_stored_before = sum(temps) * layer_mass * CP

    energy_in = 0.0
    energy_out = 0.0
    loss = 0.0
    charge_out_sum = 0.0
    discharge_out_sum = 0.0

    f_charge = charge_kg_s * sub_dt / layer_mass
    f_discharge = discharge_kg_s * sub_dt / layer_mass

    for _ in range(n_sub):
        # Plug flow, upwind in each circuit's direction.
        if f_charge > 0.0:
            bottom_out = temps[-1]
            for i in range(n - 1, 0, -1):
                temps[i] += f_charge * (temps[i - 1] - temps[i])
            temps[0] += f_charge * (charge_temp_c - temps[0])
            energy_in += charge_kg_s * sub_dt * CP * charge_temp_c
            energy_out += charge_kg_s * sub_dt * CP * bottom_out
            charge_out_sum += bottom_out
        if f_discharge > 0.0:
            top_out = temps[0]
            for i in range(n - 1):
                temps[i] += f_discharge * (temps[i + 1] - temps[i])
            temps[-1] += f_discharge * (return_temp_c - temps[-1])
            energy_in += discharge_kg_s * sub_dt * CP * return_temp_c
            energy_out += discharge_kg_s * sub_dt * CP * top_out
            discharge_out_sum += top_out

        # Inter-layer conduction (antisymmetric, conserves energy exactly).
        if n > 1:
            fluxes = [cond_coupling * (temps[i + 1] - temps[i]) for i in range(n - 1)]
            scale = sub_dt / (layer_mass * CP)
            for i in range(n - 1):
                q = fluxes[i] * scale
                temps[i] += q
                temps[i + 1] -= q

        # Ambient losses; the top and bottom layers carry the end caps.
        if loss_w_per_m2_k > 0.0:
            for i in range(n):
                area = area_side
                if i == 0:
                    area += area_cross
                if i == n - 1:
                    area += area_cross
                q = loss_w_per_m2_k * area * (temps[i] - ambient_c) * sub_dt
                loss += q
                temps[i] -= q / (layer_mass * CP)

        _mix_inversions(temps)

    e_stored_after = sum(temps) * layer_mass * CP
    accounting = TankStepAccounting(
        energy_in_j=energy_in,
        energy_out_j=energy_out,
        loss_j=loss,
        stored_delta_j=e_stored_after - e_stored_before,
        charge_outlet_c=charge_out_sum / n_sub if charge_kg_s > 0 else temps[-1],
        discharge_outlet_c=discharge_out_sum / n_sub if discharge_kg_s > 0 else temps[0],
    )
    new_state = TankState(tuple(temps), state.diameter_m, state.height_m)
    return new_state, accounting
