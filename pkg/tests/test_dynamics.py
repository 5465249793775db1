import math

import numpy as np
import pytest

from ringres.cavity.dynamics import (
    TERMS,
    derivatives,
    nonlinear_detuning,
    output_fields,
    step_rk4,
)
from ringres.cavity.feedback import simulate
from ringres.cavity.state import CavityState
from ringres.errors import IntegrationError
from tests.reservoir_test_utils import default_params


def lorentzian_drop(params, power, detuning):
    """Steady-state drop power of the linear add-drop ring with a dark add port."""
    mu2 = params.input_coupling**2
    half = 0.5 * params.linear_decay
    return mu2 * mu2 * power / (half * half + detuning * detuning)


class TestDerivatives:
    def test_cold_cavity_is_driven_by_input(self):
        params = default_params()
        rates = derivatives(CavityState(), 1e-2, 0.0, params)
        assert rates.modal_amplitude == pytest.approx(1j * params.input_coupling * 1e-2)
        assert rates.carrier_density == 0.0
        assert rates.temperature_offset == 0.0

    def test_carriers_and_heat_relax(self):
        params = default_params()
        state = CavityState(0j, 1e22, 2.0)
        rates = derivatives(state, 0.0, 0.0, params)
        assert rates.carrier_density == pytest.approx(-1e22 / params.carrier_lifetime)
        assert rates.temperature_offset == pytest.approx(-2.0 / params.thermal_time)

    def test_nonlinear_detuning_adds_both_shifts(self):
        params = default_params()
        state = CavityState(0j, 1e22, 1.0)
        expected = params.shift_per_carrier * 1e22 + params.shift_per_kelvin
        assert nonlinear_detuning(state, params) == pytest.approx(expected)


class TestOutputFields:
    def test_port_convention(self):
        params = default_params()
        a = 1e-6 + 2e-6j
        fields = output_fields(CavityState(a), 0.1, 0.05, params)
        assert fields.e_through == pytest.approx(0.1 + 1j * params.input_coupling * a)
        assert fields.e_drop == pytest.approx(0.05 + 1j * params.add_coupling * a)
        assert fields.drop_power == pytest.approx(abs(fields.e_drop) ** 2)


class TestStepRk4:
    def test_held_input_equals_three_equal_samples(self):
        params = default_params()
        state = CavityState(1e-7j, 1e20, 0.1)
        held = step_rk4(state, 0.03, 0.0, params)
        sampled = step_rk4(state, [0.03, 0.03, 0.03], [0, 0, 0], params)
        assert held == sampled

    def test_rejects_wrong_sample_count(self):
        with pytest.raises(ValueError):
            step_rk4(CavityState(), [0.1, 0.1], 0.0, default_params())

    def test_non_finite_state_raises_with_term(self):
        params = default_params()
        with pytest.raises(IntegrationError) as excinfo:
            step_rk4(CavityState(), 1e200, 0.0, params, time=5e-12)
        assert excinfo.value.term in TERMS.values()
        assert excinfo.value.time == pytest.approx(6e-12)


class TestLinearCavity:
    @pytest.mark.parametrize("detuning_ghz", np.linspace(-100.0, 100.0, 21))
    def test_steady_state_matches_lorentzian(self, detuning_ghz):
        detuning = 2 * math.pi * detuning_ghz * 1e9
        params = default_params().linearized().with_detuning(detuning)
        power = 1e-3
        # 3 ns is more than 100 photon lifetimes
        result = simulate([math.sqrt(power)], params, hold=3000, window=1, closed_loop=False)
        expected = lorentzian_drop(params, power, detuning)
        assert result.drop_power[-1] == pytest.approx(expected, rel=1e-6)

    def test_resonance_is_at_zero_detuning(self):
        params = default_params().linearized()
        drops = [
            simulate([0.03], params.with_detuning(d), hold=3000, closed_loop=False).drop_power[-1]
            for d in (-1e11, 0.0, 1e11)
        ]
        assert drops[1] > drops[0]
        assert drops[1] > drops[2]


class TestConvergence:
    def test_fourth_order_in_step(self):
        """Halving dt shrinks the amplitude error roughly sixteenfold."""
        base = default_params().linearized().with_detuning(2 * math.pi * 100e9)
        duration = 50e-12
        field = math.sqrt(1e-3)

        def final_amplitude(dt):
            params = base.replace(integration_step=dt)
            state = CavityState()
            for n in range(int(round(duration / dt))):
                state = step_rk4(state, field, 0.0, params, time=n * dt)
            return state.modal_amplitude

        reference = final_amplitude(1e-12 / 16)
        errors = [abs(final_amplitude(dt) - reference) for dt in (1e-12, 0.5e-12, 0.25e-12)]
        orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
        assert min(orders) >= 3.5

    def test_simulate_failure_reports_time(self):
        params = default_params()
        with pytest.raises(IntegrationError) as excinfo:
            simulate([1e200], params, hold=10)
        assert excinfo.value.time > 0
