"""
Temporal coupled-mode equations of the add-drop ring with free carriers and heating.

In the frame rotating at the pump frequency (Delta omega = omega_0 - omega_p):

    da/dt   = [i(Delta omega + 2 pi delta_NL) - gamma_tot/2] a + i mu_1 E_in + i mu_2 E_add
    dN/dt   = -N / tau_FC + G_TPA |a|^4
    dT/dt   = -T / tau_th + eta_th (f_abs gamma_i + gamma_TPA + gamma_FCA) |a|^2

with gamma_tot = gamma_i + 2 gamma_c + gamma_TPA(|a|^2) + gamma_FCA(N) and
delta_NL = (shift per carrier) N + (shift per kelvin) T.

Ports use the i-phase coupling convention for both couplers:

    E_through = E_in  + i mu_1 a
    E_drop    = E_add + i mu_2 a

The scalar kernels below are compiled with numba and shared by the
trajectory loop in ``ringres.cavity.feedback``.
"""

import math
from typing import NamedTuple, Sequence, Union

import numpy as np
from numba import njit

from ringres.cavity.params import (
    C_CARRIER_GENERATION,
    C_CARRIER_LIFETIME,
    C_DETUNING,
    C_FCA_LOSS,
    C_HEATING,
    C_LINEAR_ABSORPTION,
    C_LINEAR_DECAY,
    C_MU_ADD,
    C_MU_IN,
    C_SHIFT_PER_CARRIER,
    C_SHIFT_PER_KELVIN,
    C_STEP,
    C_THERMAL_TIME,
    C_TPA_LOSS,
    PhysicalParams,
)
from ringres.cavity.state import CavityState, PortFields
from ringres.errors import IntegrationError

TWO_PI = 2.0 * math.pi

# Failure codes returned by the compiled kernels.
FINITE = 0
TERMS = {1: "modal amplitude", 2: "carrier density", 3: "temperature"}

FieldSamples = Union[complex, Sequence[complex]]


class StateRates(NamedTuple):
    modal_amplitude: complex
    carrier_density: float
    temperature_offset: float


@njit(cache=True)
def _rhs(a, carriers, heat, e_in, e_add, c):
    energy = a.real * a.real + a.imag * a.imag
    gamma_tpa = c[C_TPA_LOSS] * energy
    gamma_fca = c[C_FCA_LOSS] * carriers
    delta = c[C_SHIFT_PER_CARRIER] * carriers + c[C_SHIFT_PER_KELVIN] * heat
    gamma = c[C_LINEAR_DECAY] + gamma_tpa + gamma_fca
    da = (1j * (c[C_DETUNING] + TWO_PI * delta) - 0.5 * gamma) * a + 1j * (
        c[C_MU_IN] * e_in + c[C_MU_ADD] * e_add
    )
    dn = -carriers / c[C_CARRIER_LIFETIME] + c[C_CARRIER_GENERATION] * energy * energy
    dh = -heat / c[C_THERMAL_TIME] + c[C_HEATING] * (
        c[C_LINEAR_ABSORPTION] + gamma_tpa + gamma_fca
    ) * energy
    return da, dn, dh


@njit(cache=True)
def _rk4(a, carriers, heat, in0, in_mid, in1, add0, add_mid, add1, c):
    """One classical RK4 step; also returns the dense-output midpoint amplitude."""
    h = c[C_STEP]
    k1a, k1n, k1h = _rhs(a, carriers, heat, in0, add0, c)
    k2a, k2n, k2h = _rhs(
        a + 0.5 * h * k1a, carriers + 0.5 * h * k1n, heat + 0.5 * h * k1h, in_mid, add_mid, c
    )
    k3a, k3n, k3h = _rhs(
        a + 0.5 * h * k2a, carriers + 0.5 * h * k2n, heat + 0.5 * h * k2h, in_mid, add_mid, c
    )
    k4a, k4n, k4h = _rhs(a + h * k3a, carriers + h * k3n, heat + h * k3h, in1, add1, c)
    a_next = a + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    n_next = carriers + h / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n)
    h_next = heat + h / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h)
    # third-order continuous extension evaluated at theta = 1/2
    a_mid = a + h / 24.0 * (5.0 * k1a + 4.0 * k2a + 4.0 * k3a - k4a)
    return a_next, n_next, h_next, a_mid


@njit(cache=True)
def _non_finite(a, carriers, heat):
    if not (math.isfinite(a.real) and math.isfinite(a.imag)):
        return 1
    if not math.isfinite(carriers):
        return 2
    if not math.isfinite(heat):
        return 3
    return 0


def nonlinear_detuning(state: CavityState, params: PhysicalParams) -> float:
    """Resonance shift in Hz: carriers push it up, heating pulls it down."""
    return (
        params.shift_per_carrier * state.carrier_density
        + params.shift_per_kelvin * state.temperature_offset
    )


def derivatives(
    state: CavityState,
    e_in: complex,
    e_add: complex,
    params: PhysicalParams,
) -> StateRates:
    da, dn, dh = _rhs(
        complex(state.modal_amplitude),
        float(state.carrier_density),
        float(state.temperature_offset),
        complex(e_in),
        complex(e_add),
        params.kernel_coefficients(),
    )
    code = _non_finite(da, dn, dh)
    if code != FINITE:
        raise IntegrationError(0.0, f"rate of {TERMS[code]}")
    return StateRates(complex(da), float(dn), float(dh))


def _three_samples(value: FieldSamples) -> tuple[complex, complex, complex]:
    if isinstance(value, (int, float, complex, np.number)):
        sample = complex(value)
        return sample, sample, sample
    samples = [complex(v) for v in value]
    if len(samples) != 3:
        raise ValueError(f"expected field samples at t, t+dt/2, t+dt; got {len(samples)}")
    return samples[0], samples[1], samples[2]


def step_rk4(
    state: CavityState,
    e_in: FieldSamples,
    e_add: FieldSamples,
    params: PhysicalParams,
    time: float = 0.0,
) -> CavityState:
    """Advance ``state`` by one integration step.

    ``e_in``/``e_add`` are either one held value or the three samples at
    t, t + dt/2 and t + dt.
    """
    in0, in_mid, in1 = _three_samples(e_in)
    add0, add_mid, add1 = _three_samples(e_add)
    a, n, h, _ = _rk4(
        complex(state.modal_amplitude),
        float(state.carrier_density),
        float(state.temperature_offset),
        in0,
        in_mid,
        in1,
        add0,
        add_mid,
        add1,
        params.kernel_coefficients(),
    )
    code = _non_finite(a, n, h)
    if code != FINITE:
        raise IntegrationError(time + params.integration_step, TERMS[code])
    return CavityState(complex(a), float(n), float(h))


def output_fields(
    state: CavityState,
    e_in: complex,
    e_add: complex,
    params: PhysicalParams,
) -> PortFields:
    a = complex(state.modal_amplitude)
    return PortFields(
        e_in=complex(e_in),
        e_add=complex(e_add),
        e_through=complex(e_in) + 1j * params.input_coupling * a,
        e_drop=complex(e_add) + 1j * params.add_coupling * a,
    )
