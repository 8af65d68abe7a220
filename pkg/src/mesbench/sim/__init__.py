"""Quasi-static time-series simulator of the coupled benchmark."""

from .powerflow import ElectricalState, PowerFlowError, solve_radial_power_flow
from .thermal import ThermalState, pipe_outlet_temperature, solve_thermal_branch
from .heatpump import HeatPumpError, heat_pump_step
from .tank import TankState, TankStepAccounting, initial_tank_state, tank_step
from .engine import (
    SimulationError,
    Trajectory,
    simulate,
    trajectory_to_csv,
    TRAJECTORY_COLUMNS,
)

__all__ = [
    "ElectricalState",
    "PowerFlowError",
    "SimulationError",
    "solve_radial_power_flow",
    "ThermalState",
    "pipe_outlet_temperature",
    "solve_thermal_branch",
    "HeatPumpError",
    "heat_pump_step",
    "TankState",
    "TankStepAccounting",
    "initial_tank_state",
    "tank_step",
    "Trajectory",
    "simulate",
    "trajectory_to_csv",
    "TRAJECTORY_COLUMNS",
]
