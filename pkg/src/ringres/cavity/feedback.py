"""
Closed-loop trajectories: the through port is fed back into the add port.

E_add(t) = T_fb * exp(i phi_fb) * E_through(t - tau_d)

The delay line is a ring buffer of tau_d/dt slots, zero at start. For every
step it keeps the through field at the start, the dense-output midpoint and
the end of the step, which are exactly the add-port samples the RK4 stages
need tau_d later.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit
from numpy.typing import ArrayLike, NDArray

from ringres.cavity.dynamics import TERMS, _non_finite, _rk4
from ringres.cavity.params import (
    C_FEEDBACK_IMAG,
    C_FEEDBACK_REAL,
    C_MU_ADD,
    C_MU_IN,
    PhysicalParams,
)
from ringres.cavity.state import DetuningTrace
from ringres.errors import IntegrationError, PreconditionError
from ringres.telemetry import get_tracer

logger = logging.getLogger(__name__)
tracer = get_tracer()

SELF_PULSING_THRESHOLD = 0.05


@njit(cache=True)
def _integrate(e_in, hold, window, c, delay_steps, closed_loop):
    m = e_in.shape[0]
    drop = np.zeros(m)
    through = np.zeros(m)
    added = np.zeros(m)
    energy = np.zeros(m)
    carriers = np.zeros(m)
    heat = np.zeros(m)
    history = np.zeros((delay_steps, 3), dtype=np.complex128)
    gain = complex(c[C_FEEDBACK_REAL], c[C_FEEDBACK_IMAG])
    if not closed_loop:
        gain = 0j
    mu_in = c[C_MU_IN]
    mu_add = c[C_MU_ADD]
    first = hold - window

    a = 0j
    n = 0.0
    h = 0.0
    step = 0
    for j in range(m):
        x = e_in[j]
        acc_drop = 0.0
        acc_through = 0.0
        acc_add = 0.0
        for s in range(hold):
            slot = step % delay_steps
            add0 = gain * history[slot, 0]
            add_mid = gain * history[slot, 1]
            add1 = gain * history[slot, 2]
            a1, n1, h1, a_mid = _rk4(a, n, h, x, x, x, add0, add_mid, add1, c)
            code = _non_finite(a1, n1, h1)
            if code != 0:
                return drop, through, added, energy, carriers, heat, step, code
            history[slot, 0] = x + 1j * mu_in * a
            history[slot, 1] = x + 1j * mu_in * a_mid
            history[slot, 2] = x + 1j * mu_in * a1
            if s >= first:
                e_drop = add1 + 1j * mu_add * a1
                e_through = history[slot, 2]
                acc_drop += e_drop.real * e_drop.real + e_drop.imag * e_drop.imag
                acc_through += e_through.real * e_through.real + e_through.imag * e_through.imag
                acc_add += add1.real * add1.real + add1.imag * add1.imag
            a = a1
            n = n1
            h = h1
            step += 1
        drop[j] = acc_drop / window
        through[j] = acc_through / window
        added[j] = acc_add / window
        energy[j] = a.real * a.real + a.imag * a.imag
        carriers[j] = n
        heat[j] = h
    return drop, through, added, energy, carriers, heat, step, 0


@dataclass(frozen=True)
class SimulationResult:
    """Per-sample records of one trajectory.

    Sample ``j`` covers ``hold`` integration steps; powers are averaged over
    the last ``window`` steps of the sample, cavity quantities are taken at
    its end.
    """

    drop_power: NDArray[np.float64]
    through_power: NDArray[np.float64]
    add_power: NDArray[np.float64]
    energy: NDArray[np.float64]
    carrier_density: NDArray[np.float64]
    temperature_offset: NDArray[np.float64]
    detuning: DetuningTrace
    sample_interval: float

    def __len__(self) -> int:
        return int(self.drop_power.size)


def simulate(
    envelope: ArrayLike,
    params: PhysicalParams,
    *,
    hold: int = 1,
    window: int = 1,
    closed_loop: bool = True,
) -> SimulationResult:
    """Integrate from the cold cavity with ``envelope`` held ``hold`` steps per sample."""
    e_in = np.ascontiguousarray(envelope, dtype=np.complex128).ravel()
    if hold < 1 or not 1 <= window <= hold:
        raise PreconditionError(f"need hold >= 1 and 1 <= window <= hold, got {hold}, {window}")

    dt = params.integration_step
    drop, through, added, energy, carriers, heat, step, code = _integrate(
        e_in,
        hold,
        window,
        params.kernel_coefficients(),
        params.delay_steps,
        closed_loop,
    )
    if code != 0:
        raise IntegrationError((step + 1) * dt, TERMS[int(code)])

    detuning = params.shift_per_carrier * carriers + params.shift_per_kelvin * heat
    return SimulationResult(
        drop_power=drop,
        through_power=through,
        add_power=added,
        energy=energy,
        carrier_density=carriers,
        temperature_offset=heat,
        detuning=DetuningTrace(detuning, hold * dt),
        sample_interval=hold * dt,
    )


def run_with_feedback(
    input_envelope: ArrayLike,
    params: PhysicalParams,
) -> tuple[NDArray[np.float64], DetuningTrace]:
    """Closed-loop run of an input sampled on the dt grid.

    Returns |E_drop|^2 and delta_NL, one value per step.
    """
    e_in = np.asarray(input_envelope, dtype=np.complex128).ravel()
    if e_in.size < params.delay_steps:
        raise PreconditionError(
            f"input has {e_in.size} samples, shorter than the feedback delay "
            f"({params.delay_steps} steps)"
        )
    result = simulate(e_in, params)
    return result.drop_power, result.detuning


def run_open_loop(
    input_envelope: ArrayLike,
    params: PhysicalParams,
) -> tuple[NDArray[np.float64], DetuningTrace]:
    """Same as ``run_with_feedback`` with the add port left dark."""
    result = simulate(input_envelope, params, closed_loop=False)
    return result.drop_power, result.detuning


def detect_self_pulsing(
    params: PhysicalParams,
    p_in: float,
    detuning: Optional[float] = None,
    *,
    settle: Optional[float] = None,
    observe: Optional[float] = None,
    sample_steps: int = 10,
    threshold: float = SELF_PULSING_THRESHOLD,
) -> tuple[bool, float]:
    """Drive the closed loop with constant power and measure the drop-power ripple.

    Args:
        params: Cavity parameters
        p_in: Constant input power in W
        detuning: Pump detuning in rad/s, defaults to ``params.pump_detuning``
        settle: Settling window in s, defaults to 20 thermal times
        observe: Observation window in s, defaults to 5 thermal times
        sample_steps: Integration steps per recorded sample
        threshold: Depth above which the response counts as self-pulsing

    Returns:
        (is_pulsing, oscillation_depth) with depth = (max - min) / mean of the
        drop power over the observation window.
    """
    if detuning is not None:
        params = params.with_detuning(detuning)
    settle = 20.0 * params.thermal_time if settle is None else settle
    observe = 5.0 * params.thermal_time if observe is None else observe
    interval = sample_steps * params.integration_step
    n_settle = int(math.ceil(settle / interval))
    n_observe = max(2, int(math.ceil(observe / interval)))

    with tracer.start_as_current_span("detect_self_pulsing") as span:
        span.set_attribute("p_in_w", p_in)
        span.set_attribute("detuning_rad_s", params.pump_detuning)
        envelope = np.full(n_settle + n_observe, math.sqrt(max(p_in, 0.0)), dtype=np.complex128)
        result = simulate(envelope, params, hold=sample_steps, window=1)
        tail = result.drop_power[n_settle:]
        mean = float(np.mean(tail))
        depth = 0.0 if mean <= 0.0 else float((np.max(tail) - np.min(tail)) / mean)
        pulsing = depth > threshold
        span.set_attribute("oscillation_depth", depth)
        span.set_attribute("self_pulsing", pulsing)

    logger.debug(f"Self-pulsing probe: depth={depth:.3e}, pulsing={pulsing}")
    return pulsing, depth
