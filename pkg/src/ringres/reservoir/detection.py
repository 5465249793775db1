import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringres.errors import PreconditionError

# L x (N + 1): node samples of one symbol per row, constant bias column last.
StateMatrix = NDArray[np.float64]


def detection_window_steps(steps_per_node: int, window_fraction: float) -> int:
    """Number of trailing dt samples averaged into one node sample."""
    return max(1, min(steps_per_node, math.ceil(window_fraction * steps_per_node - 1e-9)))


def photodetect(
    drop_power: ArrayLike,
    steps_per_node: int,
    window_fraction: float = 0.25,
) -> NDArray[np.float64]:
    """Square-law detection: mean drop power over the final part of every node slot."""
    waveform = np.asarray(drop_power, dtype=np.float64).ravel()
    if steps_per_node < 1 or waveform.size % steps_per_node:
        raise PreconditionError(
            f"waveform of {waveform.size} samples is not aligned to "
            f"{steps_per_node} steps per node"
        )
    window = detection_window_steps(steps_per_node, window_fraction)
    slots = waveform.reshape(-1, steps_per_node)
    return slots[:, steps_per_node - window :].mean(axis=1)


def with_bias_column(features: ArrayLike) -> StateMatrix:
    rows = np.asarray(features, dtype=np.float64)
    return np.hstack([rows, np.ones((rows.shape[0], 1))])


def assemble_states(
    node_samples: ArrayLike,
    length: int,
    node_count: int,
    warmup: int = 0,
) -> StateMatrix:
    """Drop the warm-up symbols, one row per symbol, append the bias column."""
    samples = np.asarray(node_samples, dtype=np.float64).ravel()
    expected = (warmup + length) * node_count
    if samples.size != expected:
        raise PreconditionError(
            f"expected (warmup + L) * N = ({warmup} + {length}) * {node_count} = {expected} "
            f"node samples, got {samples.size}"
        )
    kept = samples[warmup * node_count :].reshape(length, node_count)
    if not np.all(np.isfinite(kept)):
        raise PreconditionError("node samples contain non-finite values")
    return with_bias_column(kept)
