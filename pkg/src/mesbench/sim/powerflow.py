"""Backward/forward sweep power flow for the radial feeder.

The feeder is a chain: slack bus 0 -- line 0 -- bus 1 -- line 1 -- bus 2 with
constant-power injections at buses 1 and 2 (generation positive). Everything
is computed in SI volts/watts; per-unit values are reported against the
nominal voltage. The hot loop deliberately uses builtin complex arithmetic,
not numpy: a three-bus sweep is called once per simulated step and scalar
numpy would dominate the runtime.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["PowerFlowError", "ElectricalState", "solve_radial_power_flow"]

_MAX_ITER = 100
_TOL_PU = 1e-10  # comfortably under the 1e-8 contract


class PowerFlowError(RuntimeError):
    """Sweep failed to converge (reports the last voltage residual)."""


@dataclass(frozen=True)
class ElectricalState:
    """Solved feeder state for one step.

    slack_exchange_kw is signed with import from the external grid positive;
    line flows are sending-end apparent power.
    """

    bus_voltages_pu: tuple[complex, ...]
    line_flows_kva: tuple[float, ...]
    slack_exchange_kw: float
    losses_kw: float
    iterations: int

    @property
    def v1_pu(self) -> float:
        return abs(self.bus_voltages_pu[1])

    @property
    def v2_pu(self) -> float:
        return abs(self.bus_voltages_pu[2])


def solve_radial_power_flow(line_impedances_ohm: tuple[complex, ...],
                            injections_w: tuple[complex, ...],
                            slack_voltage_pu: float,
                            nominal_voltage_v: float) -> ElectricalState:
    """Solve the chain feeder for the given complex power injections.

    ``injections_w`` holds S = P + jQ per non-slack bus, generation positive.
    Raises PowerFlowError after 100 sweeps without |dV| < tolerance.
    """
    n_lines = len(line_impedances_ohm)
    if len(injections_w) != n_lines:
        raise ValueError("need one injection per non-slack bus")

    v0 = slack_voltage_pu * nominal_voltage_v
    volts = [complex(v0, 0.0)] * n_lines  # buses 1..n
    tol_v = _TOL_PU * nominal_voltage_v

    branch_currents = [0j] * n_lines
    for it in range(1, _MAX_ITER + 1):
        # Backward: accumulate branch currents from the feeder end.
        downstream = 0j
        for b in range(n_lines - 1, -1, -1):
            v = volts[b]
            if v == 0:
                raise PowerFlowError(f"voltage collapsed to zero at bus {b + 1}")
            downstream += (injections_w[b] / v).conjugate()
            # Injection is generation-positive, so the branch toward the
            # slack carries the negated accumulated current.
            branch_currents[b] = -downstream

        # Forward: update voltages from the slack.
        max_dv = 0.0
        v_up = complex(v0, 0.0)
        for b in range(n_lines):
            v_new = v_up - line_impedances_ohm[b] * branch_currents[b]
            dv = abs(v_new - volts[b])
            if dv > max_dv:
                max_dv = dv
            volts[b] = v_new
            v_up = v_new

        if max_dv < tol_v:
            break
    else:
        raise PowerFlowError(
            f"no convergence after {_MAX_ITER} sweeps, last |dV| = "
            f"{max_dv / nominal_voltage_v:.3e} pu"
        )

    # One consistent backward pass with the converged voltages so the
    # reported flows, losses and slack exchange balance to rounding error.
    downstream = 0j
    for b in range(n_lines - 1, -1, -1):
        downstream += (injections_w[b] / volts[b]).conjugate()
        branch_currents[b] = -downstream

    slack_power_w = (complex(v0, 0.0) * branch_currents[0].conjugate()).real
    flows_kva = []
    losses_w = 0.0
    v_up = complex(v0, 0.0)
    for b in range(n_lines):
        s_send = v_up * branch_currents[b].conjugate()
        flows_kva.append(abs(s_send) / 1e3)
        losses_w += line_impedances_ohm[b].real * abs(branch_currents[b]) ** 2
        v_up = volts[b]

    return ElectricalState(
        bus_voltages_pu=tuple(
            [complex(slack_voltage_pu, 0.0)] + [v / nominal_voltage_v for v in volts]
        ),
        line_flows_kva=tuple(flows_kva),
        slack_exchange_kw=slack_power_w / 1e3,
        losses_kw=losses_w / 1e3,
        iterations=it,
    )
