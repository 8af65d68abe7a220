"""The two benchmark controllers.

Voltage controller: proportional curtailment of the heat pump's power limit
when the measured feeder voltage sags below the reference, protecting the
weak grid from the power-to-heat load.

Flex-heat supervisor: a three-mode state machine choosing between pure grid
supply, charging the storage from PV surplus, and discharging the storage to
support the network, with hysteresis on the tank sensor temperatures.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

__all__ = [
    "VoltageControllerConfig",
    "FlexHeatMode",
    "FlexHeatState",
    "voltage_power_limit",
    "flex_heat_step",
]


@dataclass(frozen=True)
class VoltageControllerConfig:
    kp_per_pu: float
    v_ref_pu: float
    rated_power_kw: float

    def __post_init__(self):
        if self.kp_per_pu < 0:
            raise ValueError("proportional gain must be non-negative")
        if not (0.9 <= self.v_ref_pu <= 1.1):
            raise ValueError("reference voltage must lie in [0.9, 1.1] pu")


def voltage_power_limit(v_meas_pu: float, cfg: VoltageControllerConfig) -> float:
    """Heat-pump power ceiling for the measured voltage.

    P_limit = P_rated * clamp(1 - Kp * max(0, V_ref - V_meas), 0, 1);
    continuous and non-decreasing in the measured voltage.
    """
    if v_meas_pu <= 0:
        raise ValueError("measured voltage must be positive")
    sag = max(0.0, cfg.v_ref_pu - v_meas_pu)
    factor = min(max(1.0 - cfg.kp_per_pu * sag, 0.0), 1.0)
    return cfg.rated_power_kw * factor


class FlexHeatMode(str, Enum):
    GRID_ONLY = "GRID_ONLY"
    CHARGE = "CHARGE"
    DISCHARGE = "DISCHARGE"


@dataclass(frozen=True)
class FlexHeatState:
    """Supervisor mode plus its hysteresis thresholds.

    Charging is watched on the bottom sensor (the tank fills top-down, so the
    bottom is the last to heat); discharging on the top sensor (the first to
    cool). Surplus below ``surplus_threshold_kw`` counts as "no surplus" for
    the discharge guard.
    """

    mode: FlexHeatMode = FlexHeatMode.GRID_ONLY
    charge_start_c: float = 55.0
    charge_stop_c: float = 70.0
    discharge_start_c: float = 70.0
    discharge_stop_c: float = 60.0
    surplus_threshold_kw: float = 20.0

    def __post_init__(self):
        if not self.charge_start_c < self.charge_stop_c:
            raise ValueError("charge band requires start < stop temperature")
        if not self.discharge_stop_c < self.discharge_start_c:
            raise ValueError("discharge band requires stop < start temperature")


def flex_heat_step(state: FlexHeatState, t_top_c: float, t_bottom_c: float,
                   pv_surplus_kw: float, p_limit_kw: float,
                   hp_min_op_kw: float) -> tuple[FlexHeatState, float, bool]:
    """One supervisor decision: (new state, hp setpoint kW, discharge enable).

    Transitions:
      GRID_ONLY -> CHARGE     surplus >= min-op and bottom below charge-stop
      CHARGE    -> GRID_ONLY  bottom at charge-stop, or the effective
                              setpoint min(surplus, limit) fell below min-op
      GRID_ONLY -> DISCHARGE  top at discharge-start and no surplus
      DISCHARGE -> GRID_ONLY  top at or below discharge-stop

    CHARGE emits setpoint min(surplus, limit); DISCHARGE enables the tank's
    supply valve and keeps the heat pump off; GRID_ONLY emits (0, False).
    """
    mode = state.mode
    effective = min(pv_surplus_kw, p_limit_kw)
    has_surplus = pv_surplus_kw >= state.surplus_threshold_kw

    if mode is FlexHeatMode.GRID_ONLY:
        if pv_surplus_kw >= hp_min_op_kw and t_bottom_c < state.charge_stop_c:
            mode = FlexHeatMode.CHARGE
        elif t_top_c >= state.discharge_start_c and not has_surplus:
            mode = FlexHeatMode.DISCHARGE
    elif mode is FlexHeatMode.CHARGE:
        if t_bottom_c >= state.charge_stop_c or effective < hp_min_op_kw:
            mode = FlexHeatMode.GRID_ONLY
    elif mode is FlexHeatMode.DISCHARGE:
        if t_top_c <= state.discharge_stop_c:
            mode = FlexHeatMode.GRID_ONLY

    if mode is FlexHeatMode.CHARGE:
        setpoint = effective if effective >= hp_min_op_kw else 0.0
        new_state = replace(state, mode=mode)
        return new_state, setpoint, False
    if mode is FlexHeatMode.DISCHARGE:
        return replace(state, mode=mode), 0.0, True
    return replace(state, mode=mode), 0.0, False
