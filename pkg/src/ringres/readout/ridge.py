"""
Linear readout trained by ridge regression on the state matrix.

The regularised normal equations (S^T S + lambda I) w = S^T y are solved
with a Cholesky-based solve. Multi-column targets share one factorisation,
which the memory-capacity evaluation relies on.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import LinAlgError, LinAlgWarning

from ringres.errors import ReadoutError, SingularSystemError

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA_GRID: tuple[float, ...] = tuple(10.0**e for e in range(-12, -1, 2))
DEFAULT_FOLDS = 5


@dataclass(frozen=True)
class ReadoutModel:
    weights: NDArray[np.float64]
    ridge_lambda: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.ridge_lambda) and self.ridge_lambda >= 0):
            raise ReadoutError(f"ridge_lambda must be finite and >= 0, got {self.ridge_lambda}")
        if not np.all(np.isfinite(self.weights)):
            raise ReadoutError("readout weights are not finite")

    @property
    def feature_count(self) -> int:
        return int(self.weights.shape[0])


def _as_matrix(states: ArrayLike) -> NDArray[np.float64]:
    matrix = np.asarray(states, dtype=np.float64)
    if matrix.ndim != 2:
        raise ReadoutError(f"state matrix must be 2-D, got shape {matrix.shape}")
    return matrix


def _check_rows(matrix: NDArray[np.float64], targets: NDArray[np.float64]) -> None:
    if targets.shape[0] != matrix.shape[0]:
        raise ReadoutError(
            f"state matrix has {matrix.shape[0]} rows but {targets.shape[0]} targets were given"
        )


def _solve(
    gram: NDArray[np.float64],
    rhs: NDArray[np.float64],
    ridge_lambda: float,
) -> NDArray[np.float64]:
    system = gram + ridge_lambda * np.eye(gram.shape[0])
    with warnings.catch_warnings():
        warnings.simplefilter("error" if ridge_lambda == 0 else "ignore", LinAlgWarning)
        try:
            return scipy.linalg.solve(system, rhs, assume_a="pos")
        except (LinAlgError, LinAlgWarning) as e:
            if ridge_lambda == 0:
                raise SingularSystemError(
                    f"normal equations are singular or ill-conditioned ({e}); "
                    "use ridge_lambda > 0"
                ) from e
    logger.debug(f"Cholesky solve failed at lambda={ridge_lambda:.1e}, using least squares")
    solution, *_ = scipy.linalg.lstsq(system, rhs)
    return np.asarray(solution)


def train_ridge(states: ArrayLike, targets: ArrayLike, ridge_lambda: float) -> ReadoutModel:
    """Fit w = argmin ||S w - y||^2 + lambda ||w||^2.

    ``targets`` may be 1-D or hold one target per column.
    """
    if not (math.isfinite(ridge_lambda) and ridge_lambda >= 0):
        raise ReadoutError(f"ridge_lambda must be finite and >= 0, got {ridge_lambda}")
    matrix = _as_matrix(states)
    y = np.asarray(targets, dtype=np.float64)
    _check_rows(matrix, y)
    weights = _solve(matrix.T @ matrix, matrix.T @ y, ridge_lambda)
    return ReadoutModel(weights=weights, ridge_lambda=float(ridge_lambda))


def predict(model: ReadoutModel, states: ArrayLike) -> NDArray[np.float64]:
    matrix = _as_matrix(states)
    if matrix.shape[1] != model.feature_count:
        raise ReadoutError(
            f"state matrix has {matrix.shape[1]} columns, readout expects {model.feature_count}"
        )
    return matrix @ model.weights


def cross_validate(
    states: ArrayLike,
    targets: ArrayLike,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    folds: int = DEFAULT_FOLDS,
) -> NDArray[np.float64]:
    """Mean validation NMSE per (lambda, target) over contiguous folds.

    Errors are normalised by the variance of the whole training target so a
    fold with a flat target does not break the score.
    """
    matrix = _as_matrix(states)
    y = np.asarray(targets, dtype=np.float64)
    _check_rows(matrix, y)
    if y.ndim == 1:
        y = y[:, None]
    if not lambda_grid:
        raise ReadoutError("lambda grid is empty")
    if folds < 2 or folds > matrix.shape[0]:
        raise ReadoutError(f"need 2 <= folds <= {matrix.shape[0]} rows, got {folds}")

    variance = y.var(axis=0)
    variance = np.where(variance > 0, variance, 1.0)
    gram = matrix.T @ matrix
    cross = matrix.T @ y
    scores = np.zeros((len(lambda_grid), y.shape[1]))
    for rows in np.array_split(np.arange(matrix.shape[0]), folds):
        held_states = matrix[rows]
        held_targets = y[rows]
        fold_gram = gram - held_states.T @ held_states
        fold_cross = cross - held_states.T @ held_targets
        for i, ridge_lambda in enumerate(lambda_grid):
            weights = _solve(fold_gram, fold_cross, max(ridge_lambda, 0.0))
            residual = held_states @ weights - held_targets
            scores[i] += np.mean(residual**2, axis=0) / variance
    return scores / folds


def select_lambda(
    states: ArrayLike,
    targets: ArrayLike,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    folds: int = DEFAULT_FOLDS,
) -> NDArray[np.float64]:
    """Best lambda for every target column (first grid value wins ties)."""
    scores = cross_validate(states, targets, lambda_grid, folds)
    grid = np.asarray(lambda_grid, dtype=np.float64)
    return grid[np.argmin(scores, axis=0)]


def fit_readout(
    states: ArrayLike,
    targets: ArrayLike,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    folds: int = DEFAULT_FOLDS,
) -> ReadoutModel:
    """Cross-validate lambda on the training rows, then refit on all of them."""
    y = np.asarray(targets, dtype=np.float64)
    if y.ndim != 1:
        raise ReadoutError("fit_readout takes a single target column")
    if len(lambda_grid) == 1:
        return train_ridge(states, y, lambda_grid[0])
    best = float(select_lambda(states, y, lambda_grid, folds)[0])
    logger.debug(f"Selected ridge lambda {best:.1e}")
    return train_ridge(states, y, best)
