"""
Input side of the reservoir: masking, biasing and optical modulation.

A symbol u(n) occupies one symbol period split into N virtual-node slots of
duration theta. Slot j carries the power level u(n) * m[j] + beta; the
modulator turns levels into a field envelope sqrt(P) whose time average is
the configured mean optical power.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringres.cavity.params import steps_in
from ringres.errors import ConfigError, PreconditionError
from ringres.reservoir.mask import Mask

DEFAULT_NODE_COUNT = 50
DEFAULT_SYMBOL_RATE = 1.0e9


@dataclass(frozen=True)
class ModulationConfig:
    symbol_rate: float = DEFAULT_SYMBOL_RATE
    node_count: int = DEFAULT_NODE_COUNT
    input_bias: float = 0.5
    average_power: float = 1e-3
    pump_detuning: float = 0.0
    detection_window: float = 0.25

    def __post_init__(self) -> None:
        errors: list[str] = []
        if not self.symbol_rate > 0:
            errors.append(f"symbol_rate must be > 0, got {self.symbol_rate}")
        if self.node_count < 1:
            errors.append(f"node_count must be >= 1, got {self.node_count}")
        if not (math.isfinite(self.average_power) and self.average_power > 0):
            errors.append(f"average_power must be finite and > 0, got {self.average_power}")
        if not 0.0 < self.detection_window <= 1.0:
            errors.append(f"detection_window must be in (0, 1], got {self.detection_window}")
        if errors:
            raise ConfigError("; ".join(errors), errors)

    @property
    def symbol_period(self) -> float:
        return 1.0 / self.symbol_rate

    @property
    def node_duration(self) -> float:
        return 1.0 / (self.symbol_rate * self.node_count)

    def steps_per_node(self, dt: float) -> int:
        return steps_in(self.node_duration, dt, "node duration")

    def with_bias(self, input_bias: float) -> "ModulationConfig":
        return replace(self, input_bias=input_bias)

    def at(self, average_power: float, pump_detuning: float) -> "ModulationConfig":
        return replace(self, average_power=average_power, pump_detuning=pump_detuning)


def build_masked_input(u: ArrayLike, mask: Mask, bias: float) -> NDArray[np.float64]:
    """Node-rate level stream: all N nodes of symbol n come before symbol n+1."""
    symbols = np.asarray(u, dtype=np.float64).ravel()
    if not np.all(np.isfinite(symbols)):
        bad = int(np.flatnonzero(~np.isfinite(symbols))[0])
        raise PreconditionError(f"input sample {bad} is not finite", index=bad)
    return (np.outer(symbols, mask.values) + bias).ravel()


def _check_levels(levels: NDArray[np.float64]) -> None:
    negative = np.flatnonzero(levels < 0.0)
    if negative.size:
        index = int(negative[0])
        raise PreconditionError(
            f"level {levels[index]:.6g} at sample {index} is a negative optical power",
            index=index,
        )


def power_scale(levels: ArrayLike, average_power: float) -> float:
    """Watts per unit level such that the stream averages to ``average_power``.

    A completely dark stream has no meaningful scale and returns 0.
    """
    stream = np.asarray(levels, dtype=np.float64).ravel()
    _check_levels(stream)
    mean = float(np.mean(stream)) if stream.size else 0.0
    if mean <= 0.0:
        return 0.0
    return average_power / mean


def node_envelope(
    levels: ArrayLike,
    average_power: float,
    scale: Optional[float] = None,
) -> tuple[NDArray[np.complex128], float]:
    """One field value per node slot plus the W/level scale that was used.

    Pass ``scale`` to reuse the scale fitted on another sequence (the training
    segment) instead of normalising this one.
    """
    stream = np.asarray(levels, dtype=np.float64).ravel()
    _check_levels(stream)
    if scale is None:
        scale = power_scale(stream, average_power)
    return np.sqrt(scale * stream).astype(np.complex128), scale


def modulate(
    levels: ArrayLike,
    cfg: ModulationConfig,
    dt: float,
    scale: Optional[float] = None,
) -> NDArray[np.complex128]:
    """Field envelope on the dt grid, held constant over each node duration."""
    envelope, _ = node_envelope(levels, cfg.average_power, scale)
    return np.repeat(envelope, cfg.steps_per_node(dt))
