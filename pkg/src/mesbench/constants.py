"""Physical constants shared across the simulator."""

WATER_CP_J_PER_KG_K = 4186.0
WATER_RHO_KG_PER_M3 = 1000.0
WATER_K_W_PER_M_K = 0.6
KELVIN_OFFSET = 273.15
