"""Carnot-fraction heat pump model.

COP = eta * T_cond / (T_cond - T_evap) on pinch-adjusted absolute
temperatures, clamped to [1, 8]. Off (P_el = 0) delivers nothing and reports
COP 0 so averages over on-periods stay well defined.
"""

from __future__ import annotations

from ..constants import KELVIN_OFFSET
from ..scenario import HeatPumpParams

__all__ = ["HeatPumpError", "heat_pump_step", "COP_FLOOR", "COP_CEILING"]

COP_FLOOR = 1.0
COP_CEILING = 8.0


class HeatPumpError(ValueError):
    """Operating point outside the feasible envelope."""


def heat_pump_step(p_el_kw: float, t_evap_source_c: float, t_cond_sink_c: float,
                   params: HeatPumpParams) -> tuple[float, float]:
    """Return (thermal output kW, COP) for one step at electrical power p_el_kw.

    p_el_kw must be 0 or lie in [min_op_kw, rated_power_kw]. The pinch
    offsets from ``params`` are applied to the source/sink temperatures
    before the Carnot expression; a sink at or below the source is an error.
    """
    if p_el_kw == 0.0:
        return 0.0, 0.0
    if not (params.min_op_kw <= p_el_kw <= params.rated_power_kw):
        raise HeatPumpError(
            f"electrical power {p_el_kw} kW outside "
            f"[{params.min_op_kw}, {params.rated_power_kw}] kW"
        )
    t_evap_k = t_evap_source_c - params.pinch_evaporator_k + KELVIN_OFFSET
    t_cond_k = t_cond_sink_c + params.pinch_condenser_k + KELVIN_OFFSET
    if t_cond_k <= t_evap_k:
        raise HeatPumpError(
            f"infeasible operating point: condenser {t_cond_k - KELVIN_OFFSET:.2f} C "
            f"not above evaporator {t_evap_k - KELVIN_OFFSET:.2f} C after pinch"
        )
    cop = params.carnot_efficiency * t_cond_k / (t_cond_k - t_evap_k)
    cop = min(max(cop, COP_FLOOR), COP_CEILING)
    return cop * p_el_kw, cop
