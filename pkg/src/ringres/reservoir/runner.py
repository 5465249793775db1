import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringres.cavity.feedback import SimulationResult, simulate
from ringres.cavity.params import PhysicalParams
from ringres.cavity.state import DetuningTrace
from ringres.errors import ConfigError
from ringres.reservoir.detection import StateMatrix, assemble_states, detection_window_steps
from ringres.reservoir.mask import Mask
from ringres.reservoir.modulation import (
    ModulationConfig,
    build_masked_input,
    node_envelope,
    power_scale,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReservoirRun:
    states: StateMatrix
    detuning: DetuningTrace
    node_samples: NDArray[np.float64]
    scale: float


class TimeDelayReservoir:
    """One physical ring, N virtual nodes multiplexed in time by the mask.

    Every call to ``run`` starts from the cold cavity with an empty delay line.
    """

    def __init__(self, params: PhysicalParams, modulation: ModulationConfig, mask: Mask) -> None:
        if mask.node_count != modulation.node_count:
            raise ConfigError(
                f"mask has {mask.node_count} weights but node_count is {modulation.node_count}"
            )
        self.params = params.with_detuning(modulation.pump_detuning)
        self.modulation = modulation
        self.mask = mask
        self.steps_per_node = modulation.steps_per_node(self.params.integration_step)
        self.window = detection_window_steps(self.steps_per_node, modulation.detection_window)

    @property
    def node_count(self) -> int:
        return self.modulation.node_count

    def levels(self, u: ArrayLike) -> NDArray[np.float64]:
        return build_masked_input(u, self.mask, self.modulation.input_bias)

    def fit_scale(self, u: ArrayLike) -> float:
        return power_scale(self.levels(u), self.modulation.average_power)

    def _trajectory(self, u: ArrayLike, scale: Optional[float]) -> tuple[SimulationResult, float]:
        envelope, used_scale = node_envelope(self.levels(u), self.modulation.average_power, scale)
        result = simulate(
            envelope,
            self.params,
            hold=self.steps_per_node,
            window=self.window,
        )
        return result, used_scale

    def simulate(self, u: ArrayLike, scale: Optional[float] = None) -> SimulationResult:
        """Per-node trajectory records of ``u``, warm-up included."""
        return self._trajectory(u, scale)[0]

    def run(self, u: ArrayLike, warmup: int = 0, scale: Optional[float] = None) -> ReservoirRun:
        """Drive the ring with ``u`` and return the post-warm-up state matrix.

        ``scale`` defaults to normalising ``u`` itself to the mean optical power.
        """
        symbols = np.asarray(u, dtype=np.float64).ravel()
        result, used_scale = self._trajectory(symbols, scale)
        states = assemble_states(
            result.drop_power,
            symbols.size - warmup,
            self.node_count,
            warmup,
        )
        return ReservoirRun(
            states=states,
            detuning=result.detuning,
            node_samples=result.drop_power,
            scale=used_scale,
        )
