import math

import pytest
from hypothesis import given, strategies as st

from mesbench.control import (
    FlexHeatMode,
    FlexHeatState,
    VoltageControllerConfig,
    flex_heat_step,
    voltage_power_limit,
)

CFG = VoltageControllerConfig(kp_per_pu=20.0, v_ref_pu=0.96, rated_power_kw=100.0)


class TestVoltageController:
    def test_no_curtailment_at_or_above_reference(self):
        assert voltage_power_limit(0.96, CFG) == 100.0
        assert voltage_power_limit(1.05, CFG) == 100.0

    def test_documented_proportional_point(self):
        # 20 1/pu gain, 0.02 pu sag: factor 1 - 0.4 = 0.6 -> 60 kW
        assert voltage_power_limit(0.94, CFG) == pytest.approx(60.0, abs=1e-12)

    def test_full_curtailment_clamp(self):
        steep = VoltageControllerConfig(1000.0, 0.96, 100.0)
        assert voltage_power_limit(0.90, steep) == 0.0

    def test_invalid_reference_rejected(self):
        with pytest.raises(ValueError):
            VoltageControllerConfig(20.0, 1.5, 100.0)
        with pytest.raises(ValueError):
            VoltageControllerConfig(-1.0, 0.96, 100.0)

    @given(v1=st.floats(min_value=0.5, max_value=1.2),
           v2=st.floats(min_value=0.5, max_value=1.2))
    def test_non_decreasing_in_voltage(self, v1, v2):
        lo, hi = sorted((v1, v2))
        assert voltage_power_limit(lo, CFG) <= voltage_power_limit(hi, CFG) + 1e-12

    @given(k1=st.floats(min_value=0.0, max_value=100.0),
           k2=st.floats(min_value=0.0, max_value=100.0),
           v=st.floats(min_value=0.5, max_value=1.2))
    def test_higher_gain_never_raises_limit(self, k1, k2, v):
        lo, hi = sorted((k1, k2))
        p_lo = voltage_power_limit(v, VoltageControllerConfig(lo, 0.96, 100.0))
        p_hi = voltage_power_limit(v, VoltageControllerConfig(hi, 0.96, 100.0))
        assert p_hi <= p_lo + 1e-12

    def test_continuity_at_reference(self):
        eps = 1e-9
        assert voltage_power_limit(0.96 - eps, CFG) == pytest.approx(100.0, abs=1e-5)


def grid_only(**kw):
    return FlexHeatState(mode=FlexHeatMode.GRID_ONLY, **kw)


class TestFlexHeatTransitions:
    def test_surplus_and_room_starts_charging(self):
        state, setpoint, discharge = flex_heat_step(
            grid_only(), t_top_c=50.0, t_bottom_c=40.0,
            pv_surplus_kw=80.0, p_limit_kw=100.0, hp_min_op_kw=20.0)
        assert state.mode is FlexHeatMode.CHARGE
        assert setpoint == 80.0
        assert discharge is False

    def test_limit_caps_the_setpoint(self):
        state, setpoint, _ = flex_heat_step(
            grid_only(), 50.0, 40.0, pv_surplus_kw=80.0,
            p_limit_kw=60.0, hp_min_op_kw=20.0)
        assert state.mode is FlexHeatMode.CHARGE
        assert setpoint == 60.0

    def test_full_tank_stops_charging(self):
        charging = FlexHeatState(mode=FlexHeatMode.CHARGE)
        state, setpoint, _ = flex_heat_step(
            charging, 75.0, t_bottom_c=70.0, pv_surplus_kw=80.0,
            p_limit_kw=100.0, hp_min_op_kw=20.0)
        assert state.mode is FlexHeatMode.GRID_ONLY
        assert setpoint == 0.0

    def test_effective_setpoint_below_min_op_stops_charging(self):
        charging = FlexHeatState(mode=FlexHeatMode.CHARGE)
        state, setpoint, _ = flex_heat_step(
            charging, 60.0, 50.0, pv_surplus_kw=10.0,
            p_limit_kw=100.0, hp_min_op_kw=20.0)
        assert state.mode is FlexHeatMode.GRID_ONLY
        assert setpoint == 0.0

    def test_hot_top_without_surplus_starts_discharge(self):
        state, setpoint, discharge = flex_heat_step(
            grid_only(), t_top_c=71.0, t_bottom_c=50.0,
            pv_surplus_kw=0.0, p_limit_kw=100.0, hp_min_op_kw=20.0)
        assert state.mode is FlexHeatMode.DISCHARGE
        assert setpoint == 0.0
        assert discharge is True

    def test_discharge_holds_until_stop_threshold(self):
        discharging = FlexHeatState(mode=FlexHeatMode.DISCHARGE)
        state, _, enable = flex_heat_step(discharging, 65.0, 50.0, 0.0, 100.0, 20.0)
        assert state.mode is FlexHeatMode.DISCHARGE and enable
        state, _, enable = flex_heat_step(discharging, 60.0, 50.0, 0.0, 100.0, 20.0)
        assert state.mode is FlexHeatMode.GRID_ONLY and not enable

    def test_grid_only_idles(self):
        state, setpoint, discharge = flex_heat_step(
            grid_only(), 55.0, 50.0, 0.0, 100.0, 20.0)
        assert state.mode is FlexHeatMode.GRID_ONLY
        assert (setpoint, discharge) == (0.0, False)

    def test_threshold_ordering_enforced(self):
        with pytest.raises(ValueError):
            FlexHeatState(charge_start_c=70.0, charge_stop_c=55.0)
        with pytest.raises(ValueError):
            FlexHeatState(discharge_start_c=60.0, discharge_stop_c=70.0)


class TestHysteresis:
    def test_sinusoid_crossing_band_switches_twice_per_period(self):
        # top temperature sweeping 50..80 across the 60/70 band; count
        # transitions by brute force over five periods
        state = FlexHeatState(mode=FlexHeatMode.GRID_ONLY)
        periods = 5
        samples = 400
        transitions = 0
        previous = state.mode
        for i in range(periods * samples):
            t_top = 65.0 + 15.0 * math.sin(2.0 * math.pi * i / samples)
            state, _, _ = flex_heat_step(state, t_top, 45.0, 0.0, 100.0, 20.0)
            if state.mode is not previous:
                transitions += 1
            previous = state.mode
        assert transitions == 2 * periods

    def test_wiggle_inside_band_never_chatters(self):
        state = FlexHeatState(mode=FlexHeatMode.DISCHARGE)
        for i in range(200):
            t_top = 65.0 + 4.0 * math.sin(i)  # stays within (60, 70)
            state, _, _ = flex_heat_step(state, t_top, 45.0, 0.0, 100.0, 20.0)
            assert state.mode is FlexHeatMode.DISCHARGE

    @given(st.lists(st.tuples(
        st.floats(min_value=30.0, max_value=95.0),   # t_top
        st.floats(min_value=30.0, max_value=95.0),   # t_bottom
        st.floats(min_value=0.0, max_value=300.0),   # surplus
        st.floats(min_value=0.0, max_value=100.0),   # p_limit
    ), min_size=1, max_size=60))
    def test_totality_and_emission_invariant(self, sequence):
        """Any input sequence yields exactly one successor mode per step and
        a setpoint in {0} union [min_op, p_limit]."""
        state = FlexHeatState(mode=FlexHeatMode.GRID_ONLY)
        min_op = 20.0
        for t_top, t_bottom, surplus, p_limit in sequence:
            state, setpoint, discharge = flex_heat_step(
                state, t_top, t_bottom, surplus, p_limit, min_op)
            assert state.mode in FlexHeatMode
            assert setpoint == 0.0 or min_op <= setpoint <= p_limit
            if discharge:
                assert state.mode is FlexHeatMode.DISCHARGE

    @given(st.lists(st.floats(min_value=40.0, max_value=90.0),
                    min_size=2, max_size=80))
    def test_discharge_band_requires_full_traversal(self, tops):
        """Between a DISCHARGE exit and the next entry the top temperature
        must climb from the stop threshold back up to the start threshold."""
        state = FlexHeatState(mode=FlexHeatMode.GRID_ONLY)
        entered_at = None
        for t_top in tops:
            before = state.mode
            state, _, _ = flex_heat_step(state, t_top, 45.0, 0.0, 100.0, 20.0)
            if before is not FlexHeatMode.DISCHARGE and state.mode is FlexHeatMode.DISCHARGE:
                assert t_top >= state.discharge_start_c
            if before is FlexHeatMode.DISCHARGE and state.mode is FlexHeatMode.GRID_ONLY:
                assert t_top <= state.discharge_stop_c
