from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringres.errors import ReadoutError

MetricKind = Literal["nmse", "accuracy", "ser"]

PAM4_ALPHABET: tuple[float, ...] = (-3.0, -1.0, 1.0, 3.0)

# Direction in which each metric improves.
HIGHER_IS_BETTER: dict[str, bool] = {"nmse": False, "accuracy": True, "ser": False}


def _pair(predicted: ArrayLike, target: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    y_hat = np.asarray(predicted, dtype=np.float64).ravel()
    y = np.asarray(target, dtype=np.float64).ravel()
    if y_hat.shape != y.shape:
        raise ReadoutError(f"prediction has {y_hat.size} samples, target has {y.size}")
    return y_hat, y


def nmse(predicted: ArrayLike, target: ArrayLike) -> float:
    """Mean squared error over the population variance of the target."""
    y_hat, y = _pair(predicted, target)
    if y.size < 2:
        raise ReadoutError(f"nmse needs at least 2 samples, got {y.size}")
    variance = float(np.var(y))
    if variance == 0.0:
        raise ReadoutError("nmse is undefined for a zero-variance target")
    return float(np.mean((y_hat - y) ** 2) / variance)


def accuracy(predicted: ArrayLike, labels: ArrayLike, threshold: float = 0.5) -> float:
    y_hat, y = _pair(predicted, labels)
    if y.size == 0:
        return 0.0
    decisions = (y_hat >= threshold).astype(np.float64)
    return float(np.mean(decisions == y))


def waveform_accuracy(
    predicted: ArrayLike,
    labels: ArrayLike,
    groups: ArrayLike,
    threshold: float = 0.5,
) -> float:
    """Accuracy after a majority vote over the points of each waveform period.

    ``groups`` holds the period index of every sample; a tied vote counts as
    square.
    """
    y_hat, y = _pair(predicted, labels)
    period = np.asarray(groups).ravel()
    if period.shape != y.shape:
        raise ReadoutError(f"groups has {period.size} entries, target has {y.size}")
    if y.size == 0:
        return 0.0
    decisions = (y_hat >= threshold).astype(np.float64)
    _, inverse, counts = np.unique(period, return_inverse=True, return_counts=True)
    votes = np.bincount(inverse, weights=decisions) / counts
    truth = np.bincount(inverse, weights=y) / counts
    return float(np.mean((votes >= 0.5) == (truth >= 0.5)))


def quantize_symbols(
    predicted: ArrayLike,
    alphabet: Sequence[float] = PAM4_ALPHABET,
) -> NDArray[np.float64]:
    """Nearest alphabet symbol; ties go to the smaller one."""
    symbols = np.sort(np.asarray(alphabet, dtype=np.float64))
    y_hat = np.asarray(predicted, dtype=np.float64).ravel()
    distance = np.abs(y_hat[:, None] - symbols[None, :])
    return symbols[np.argmin(distance, axis=1)]


def ser(
    predicted: ArrayLike,
    symbols: ArrayLike,
    alphabet: Sequence[float] = PAM4_ALPHABET,
) -> float:
    y_hat, d = _pair(predicted, symbols)
    if d.size == 0:
        return 0.0
    return float(np.mean(quantize_symbols(y_hat, alphabet) != d))


def score(kind: str, predicted: ArrayLike, target: ArrayLike) -> float:
    if kind == "nmse":
        return nmse(predicted, target)
    if kind == "accuracy":
        return accuracy(predicted, target)
    if kind == "ser":
        return ser(predicted, target)
    raise ReadoutError(f"unknown metric '{kind}'")


def is_better(kind: str, candidate: float, incumbent: float) -> bool:
    if HIGHER_IS_BETTER[kind]:
        return candidate > incumbent
    return candidate < incumbent
