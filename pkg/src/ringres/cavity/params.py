"""
Physical parameters of the add-drop microring and its feedback waveguide.

Two layers are kept apart:

* ``CavityDesign`` holds the constants a user writes in the config file
  (wavelength, loaded Q, material coefficients, mode volume, ...).
* ``PhysicalParams`` holds the rates and coefficients the coupled-mode
  equations actually use. It is immutable, validated on construction and
  safe to share between worker processes.

All quantities are SI. The modal amplitude is energy-normalised (|a|^2 in J)
and port fields are power-normalised (|E|^2 in W).
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from ringres.errors import ConfigError

SPEED_OF_LIGHT = 299_792_458.0
REDUCED_PLANCK = 1.054_571_817e-34
DB_PER_NEPER = 10.0 / math.log(10.0)

# Default integration step for carrier lifetimes of 1 ns and above.
BASE_STEP = 1e-12

# Index layout of the coefficient vector handed to the compiled kernel.
C_DETUNING = 0
C_LINEAR_DECAY = 1
C_MU_IN = 2
C_MU_ADD = 3
C_TPA_LOSS = 4
C_FCA_LOSS = 5
C_CARRIER_GENERATION = 6
C_CARRIER_LIFETIME = 7
C_THERMAL_TIME = 8
C_HEATING = 9
C_LINEAR_ABSORPTION = 10
C_SHIFT_PER_CARRIER = 11
C_SHIFT_PER_KELVIN = 12
C_FEEDBACK_REAL = 13
C_FEEDBACK_IMAG = 14
C_STEP = 15
N_COEFFICIENTS = 16


@dataclass(frozen=True)
class CavityDesign:
    """Material and geometry constants of the silicon ring (config section ``cavity``)."""

    wavelength: float = 1550e-9
    loaded_q: float = 3.0e4
    group_index: float = 4.2
    waveguide_loss_db_per_cm: float = 0.8
    silicon_index: float = 3.485
    thermo_optic_coefficient: float = 1.86e-4
    fcd_index_coefficient: float = -1.73e-27
    tpa_beta: float = 0.79e-11
    fca_cross_section: float = 1.0e-21
    mode_volume: float = 6.3e-18
    thermal_heating_efficiency: float = 9.7e10
    linear_absorption_fraction: float = 0.5
    carrier_lifetime: float = 10e-9
    thermal_time: float = 50e-9
    feedback_delay: float = 0.5e-9
    feedback_phase: float = 0.0
    feedback_amplitude_transmission: float = 1.0

    @property
    def resonance_frequency(self) -> float:
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength

    @property
    def intrinsic_decay(self) -> float:
        alpha_per_m = self.waveguide_loss_db_per_cm * 100.0 / DB_PER_NEPER
        return alpha_per_m * SPEED_OF_LIGHT / self.group_index

    @property
    def total_linear_decay(self) -> float:
        return self.resonance_frequency / self.loaded_q


def default_integration_step(carrier_lifetime: float) -> float:
    """1 ps for slow carriers, otherwise the largest 1 ps divisor below tau_FC/10.

    Keeping dt a divisor of 1 ps keeps the node duration and the feedback delay
    exact multiples of the step.
    """
    if carrier_lifetime >= 1e-9:
        return BASE_STEP
    ceiling = min(BASE_STEP, carrier_lifetime / 10.0)
    return BASE_STEP / math.ceil(BASE_STEP / ceiling - 1e-9)


def steps_in(duration: float, dt: float, what: str) -> int:
    """Number of dt steps in ``duration``; the ratio must be an integer."""
    ratio = duration / dt
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > 1e-6 * max(1.0, ratio):
        raise ConfigError(f"{what} ({duration:.6e} s) is not an integer multiple of dt ({dt:.6e} s)")
    return steps


@dataclass(frozen=True)
class PhysicalParams:
    resonance_frequency: float
    pump_detuning: float
    intrinsic_decay: float
    coupling_decay_per_coupler: float
    input_coupling: float
    add_coupling: float
    tpa_coefficient: float
    tpa_loss_coefficient: float
    fca_cross_section: float
    group_index: float
    fcd_index_coefficient: float
    thermo_optic_coefficient: float
    silicon_index: float
    thermal_heating_efficiency: float
    linear_absorption_fraction: float
    carrier_lifetime: float
    thermal_time: float
    feedback_delay: float
    feedback_phase: float
    feedback_amplitude_transmission: float
    integration_step: float

    def __post_init__(self) -> None:
        errors: list[str] = []
        positive = {
            "resonance_frequency": self.resonance_frequency,
            "coupling_decay_per_coupler": self.coupling_decay_per_coupler,
            "carrier_lifetime": self.carrier_lifetime,
            "thermal_time": self.thermal_time,
            "feedback_delay": self.feedback_delay,
            "integration_step": self.integration_step,
            "silicon_index": self.silicon_index,
            "group_index": self.group_index,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                errors.append(f"{name} must be finite and > 0, got {value}")
        non_negative = {
            "intrinsic_decay": self.intrinsic_decay,
            "tpa_coefficient": self.tpa_coefficient,
            "tpa_loss_coefficient": self.tpa_loss_coefficient,
            "fca_cross_section": self.fca_cross_section,
            "thermal_heating_efficiency": self.thermal_heating_efficiency,
        }
        for name, value in non_negative.items():
            if not (math.isfinite(value) and value >= 0):
                errors.append(f"{name} must be finite and >= 0, got {value}")
        if not 0.0 <= self.feedback_amplitude_transmission <= 1.0:
            errors.append(
                "feedback_amplitude_transmission must be in [0, 1], "
                f"got {self.feedback_amplitude_transmission}"
            )
        if not 0.0 <= self.linear_absorption_fraction <= 1.0:
            errors.append(
                f"linear_absorption_fraction must be in [0, 1], got {self.linear_absorption_fraction}"
            )
        if errors:
            raise ConfigError("; ".join(errors), errors)

        dt = self.integration_step
        if dt > self.photon_lifetime / 10.0 * (1 + 1e-9):
            errors.append(
                f"integration_step {dt:.3e} s exceeds photon lifetime/10 ({self.photon_lifetime / 10:.3e} s)"
            )
        if self.carrier_lifetime >= 100e-12 and dt > self.carrier_lifetime / 10.0 * (1 + 1e-9):
            errors.append(
                f"integration_step {dt:.3e} s exceeds carrier_lifetime/10 ({self.carrier_lifetime / 10:.3e} s)"
            )
        if errors:
            raise ConfigError("; ".join(errors), errors)
        steps_in(self.feedback_delay, dt, "feedback_delay")

    @classmethod
    def from_design(
        cls,
        design: CavityDesign,
        *,
        pump_detuning: float = 0.0,
        carrier_lifetime: Optional[float] = None,
        thermal_time: Optional[float] = None,
        integration_step: Optional[float] = None,
    ) -> "PhysicalParams":
        omega0 = design.resonance_frequency
        gamma_i = design.intrinsic_decay
        gamma_c = 0.5 * (design.total_linear_decay - gamma_i)
        if gamma_c <= 0:
            raise ConfigError(
                f"loaded_q={design.loaded_q} is not reachable with "
                f"{design.waveguide_loss_db_per_cm} dB/cm intrinsic loss"
            )
        mu = math.sqrt(gamma_c)
        tpa_loss = design.tpa_beta * SPEED_OF_LIGHT**2 / (
            design.group_index**2 * design.mode_volume
        )
        generation = tpa_loss / (2.0 * REDUCED_PLANCK * omega0 * design.mode_volume)
        tau_fc = design.carrier_lifetime if carrier_lifetime is None else carrier_lifetime
        tau_th = design.thermal_time if thermal_time is None else thermal_time
        dt = default_integration_step(tau_fc) if integration_step is None else integration_step
        return cls(
            resonance_frequency=omega0,
            pump_detuning=pump_detuning,
            intrinsic_decay=gamma_i,
            coupling_decay_per_coupler=gamma_c,
            input_coupling=mu,
            add_coupling=mu,
            tpa_coefficient=generation,
            tpa_loss_coefficient=tpa_loss,
            fca_cross_section=design.fca_cross_section,
            group_index=design.group_index,
            fcd_index_coefficient=design.fcd_index_coefficient,
            thermo_optic_coefficient=design.thermo_optic_coefficient,
            silicon_index=design.silicon_index,
            thermal_heating_efficiency=design.thermal_heating_efficiency,
            linear_absorption_fraction=design.linear_absorption_fraction,
            carrier_lifetime=tau_fc,
            thermal_time=tau_th,
            feedback_delay=design.feedback_delay,
            feedback_phase=design.feedback_phase,
            feedback_amplitude_transmission=design.feedback_amplitude_transmission,
            integration_step=dt,
        )

    @property
    def linear_decay(self) -> float:
        return self.intrinsic_decay + 2.0 * self.coupling_decay_per_coupler

    @property
    def photon_lifetime(self) -> float:
        return 1.0 / self.linear_decay

    @property
    def delay_steps(self) -> int:
        return steps_in(self.feedback_delay, self.integration_step, "feedback_delay")

    @property
    def feedback_gain(self) -> complex:
        return self.feedback_amplitude_transmission * complex(
            math.cos(self.feedback_phase), math.sin(self.feedback_phase)
        )

    @property
    def shift_per_carrier(self) -> float:
        """Resonance shift in Hz per m^-3 of excess carriers (positive: blue shift)."""
        return -self.resonance_frequency * self.fcd_index_coefficient / (
            self.silicon_index * 2.0 * math.pi
        )

    @property
    def shift_per_kelvin(self) -> float:
        """Resonance shift in Hz per kelvin (negative: red shift)."""
        return -self.resonance_frequency * self.thermo_optic_coefficient / (
            self.silicon_index * 2.0 * math.pi
        )

    @property
    def fca_loss_coefficient(self) -> float:
        return self.fca_cross_section * SPEED_OF_LIGHT / self.group_index

    def replace(self, **changes: float) -> "PhysicalParams":
        return replace(self, **changes)

    def with_detuning(self, pump_detuning: float) -> "PhysicalParams":
        return replace(self, pump_detuning=pump_detuning)

    def linearized(self) -> "PhysicalParams":
        """Same cavity with every nonlinear coupling switched off."""
        return replace(
            self,
            tpa_coefficient=0.0,
            tpa_loss_coefficient=0.0,
            fca_cross_section=0.0,
            fcd_index_coefficient=0.0,
            thermo_optic_coefficient=0.0,
        )

    def kernel_coefficients(self) -> NDArray[np.float64]:
        gain = self.feedback_gain
        c = np.zeros(N_COEFFICIENTS, dtype=np.float64)
        c[C_DETUNING] = self.pump_detuning
        c[C_LINEAR_DECAY] = self.linear_decay
        c[C_MU_IN] = self.input_coupling
        c[C_MU_ADD] = self.add_coupling
        c[C_TPA_LOSS] = self.tpa_loss_coefficient
        c[C_FCA_LOSS] = self.fca_loss_coefficient
        c[C_CARRIER_GENERATION] = self.tpa_coefficient
        c[C_CARRIER_LIFETIME] = self.carrier_lifetime
        c[C_THERMAL_TIME] = self.thermal_time
        c[C_HEATING] = self.thermal_heating_efficiency
        c[C_LINEAR_ABSORPTION] = self.linear_absorption_fraction * self.intrinsic_decay
        c[C_SHIFT_PER_CARRIER] = self.shift_per_carrier
        c[C_SHIFT_PER_KELVIN] = self.shift_per_kelvin
        c[C_FEEDBACK_REAL] = gain.real
        c[C_FEEDBACK_IMAG] = gain.imag
        c[C_STEP] = self.integration_step
        return c
