import pytest
from hypothesis import given, strategies as st

from mesbench.scenario import HeatPumpParams
from mesbench.sim import HeatPumpError, heat_pump_step

NO_PINCH = HeatPumpParams(rated_power_kw=100.0, min_op_kw=0.0,
                          carnot_efficiency=0.45,
                          pinch_evaporator_k=0.0, pinch_condenser_k=0.0)


class TestHeatPump:
    def test_off_delivers_nothing(self):
        assert heat_pump_step(0.0, 5.0, 65.0, NO_PINCH) == (0.0, 0.0)

    def test_documented_carnot_point(self):
        # eta=0.45, evaporator 5 C, condenser 65 C post-pinch:
        # Carnot = 338.15/60 = 5.636, COP = 2.536, 100 kW el -> 253.6 kW th
        q_th, cop = heat_pump_step(100.0, 5.0, 65.0, NO_PINCH)
        assert cop == pytest.approx(0.45 * 338.15 / 60.0, abs=1e-9)
        assert cop == pytest.approx(2.536, abs=1e-3)
        assert q_th == pytest.approx(253.6, abs=0.1)

    def test_equal_temperatures_error(self):
        with pytest.raises(HeatPumpError, match="infeasible"):
            heat_pump_step(50.0, 65.0, 65.0, NO_PINCH)

    def test_pinch_offsets_applied(self):
        params = HeatPumpParams(rated_power_kw=100.0, min_op_kw=0.0,
                                carnot_efficiency=0.45,
                                pinch_evaporator_k=5.0, pinch_condenser_k=5.0)
        _, cop_pinched = heat_pump_step(50.0, 10.0, 60.0, params)
        _, cop_direct = heat_pump_step(50.0, 5.0, 65.0, NO_PINCH)
        assert cop_pinched == pytest.approx(cop_direct, abs=1e-12)

    def test_cop_ceiling(self):
        # tiny lift: unclamped Carnot would exceed 8
        _, cop = heat_pump_step(50.0, 40.0, 45.0, NO_PINCH)
        assert cop == 8.0

    def test_cop_floor(self):
        params = HeatPumpParams(rated_power_kw=100.0, min_op_kw=0.0,
                                carnot_efficiency=0.05,
                                pinch_evaporator_k=0.0, pinch_condenser_k=0.0)
        _, cop = heat_pump_step(50.0, 5.0, 65.0, params)
        assert cop == 1.0

    def test_power_envelope_enforced(self):
        params = HeatPumpParams(rated_power_kw=100.0, min_op_kw=20.0)
        with pytest.raises(HeatPumpError):
            heat_pump_step(10.0, 5.0, 65.0, params)
        with pytest.raises(HeatPumpError):
            heat_pump_step(120.0, 5.0, 65.0, params)

    @given(p=st.floats(min_value=1.0, max_value=100.0),
           sink=st.floats(min_value=30.0, max_value=90.0))
    def test_output_scales_linearly_with_power(self, p, sink):
        q, cop = heat_pump_step(p, 5.0, sink, NO_PINCH)
        assert q == pytest.approx(cop * p, rel=1e-12)
        assert 1.0 <= cop <= 8.0

    @given(sink_lo=st.floats(min_value=30.0, max_value=89.0),
           lift=st.floats(min_value=0.5, max_value=10.0))
    def test_hotter_sink_never_improves_cop(self, sink_lo, lift):
        _, cop_lo = heat_pump_step(50.0, 5.0, sink_lo, NO_PINCH)
        _, cop_hi = heat_pump_step(50.0, 5.0, sink_lo + lift, NO_PINCH)
        assert cop_hi <= cop_lo + 1e-12
