from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True)
class CavityState:
    """Instantaneous ring state: modal amplitude (sqrt J), excess carriers (m^-3), heating (K)."""

    modal_amplitude: complex = 0j
    carrier_density: float = 0.0
    temperature_offset: float = 0.0


@dataclass(frozen=True)
class PortFields:
    """Complex envelopes (sqrt W) at the four ring ports."""

    e_in: complex
    e_add: complex
    e_through: complex
    e_drop: complex

    @property
    def through_power(self) -> float:
        return abs(self.e_through) ** 2

    @property
    def drop_power(self) -> float:
        return abs(self.e_drop) ** 2


@dataclass(frozen=True)
class DetuningTrace:
    """Nonlinear resonance detuning samples (Hz) on the node-sampling grid."""

    samples: NDArray[np.float64]
    sample_interval: float

    @property
    def sigma(self) -> float:
        """Population standard deviation of the trace."""
        if self.samples.size == 0:
            return 0.0
        return float(np.std(self.samples))

    @property
    def times(self) -> NDArray[np.float64]:
        return (np.arange(self.samples.size) + 1) * self.sample_interval

    def __len__(self) -> int:
        return int(self.samples.size)

    @classmethod
    def concatenate(cls, traces: list["DetuningTrace"]) -> "DetuningTrace":
        if not traces:
            return cls(np.zeros(0), 0.0)
        return cls(
            np.concatenate([trace.samples for trace in traces]),
            traces[0].sample_interval,
        )
