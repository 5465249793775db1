"""
Linear and nonlinear memory capacities of the reservoir.

For order i and delay k the readout reconstructs y_k(n) = P_i(u~(n - k)),
where u~ is the drive mapped onto [-1, 1] and P_i a Legendre polynomial,

    P_1(x) = x,  P_2(x) = 3x^2 - 1,  P_3(x) = (5x^3 - 3x) / 2

P_2 keeps the 3x^2 - 1 form, twice the textbook normalisation; the capacity
C = 1 - NMSE does not depend on the target scale. Capacities are measured on
held-out rows, floored at 0 and zeroed below the finite-sample threshold
2 / sqrt(L_test). MC is the sum over k = 1..k_max and the orders.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import eval_legendre

from ringres.errors import PreconditionError
from ringres.readout.ridge import (
    DEFAULT_FOLDS,
    DEFAULT_LAMBDA_GRID,
    select_lambda,
    train_ridge,
)
from ringres.reservoir.detection import StateMatrix
from ringres.telemetry import get_tracer

logger = logging.getLogger(__name__)
tracer = get_tracer()

ORDERS = (1, 2, 3)
DEFAULT_K_MAX = 50
NARMA_INPUT_RANGE = (0.0, 0.5)

# P_i as used here divided by the standard Legendre polynomial
PRINTED_SCALE = {1: 1.0, 2: 2.0, 3: 1.0}

StateSource = Callable[[NDArray[np.float64], int], StateMatrix]


@dataclass(frozen=True)
class CapacitySettings:
    orders: tuple[int, ...] = ORDERS
    k_max: int = DEFAULT_K_MAX
    noise_threshold: Optional[float] = None
    rescale: bool = True
    input_range: tuple[float, float] = NARMA_INPUT_RANGE
    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    folds: int = DEFAULT_FOLDS

    def threshold(self, test_rows: int) -> float:
        if self.noise_threshold is not None:
            return self.noise_threshold
        return 2.0 / math.sqrt(test_rows)


def rescale_input(u: ArrayLike, input_range: tuple[float, float] = NARMA_INPUT_RANGE) -> NDArray[np.float64]:
    low, high = input_range
    return 2.0 * (np.asarray(u, dtype=np.float64) - low) / (high - low) - 1.0


def legendre_target(order: int, delay: int, u: ArrayLike) -> NDArray[np.float64]:
    """P_order(u(n - delay)) with zeros before the start of ``u``."""
    if order not in PRINTED_SCALE:
        raise PreconditionError(f"order must be one of {sorted(PRINTED_SCALE)}, got {order}")
    if delay < 0:
        raise PreconditionError(f"delay must be >= 0, got {delay}")
    x = np.asarray(u, dtype=np.float64).ravel()
    shifted = np.concatenate([np.zeros(delay), x[: x.size - delay]]) if delay else x
    return PRINTED_SCALE[order] * eval_legendre(order, shifted)


def _prepare(u: ArrayLike, settings: CapacitySettings) -> NDArray[np.float64]:
    x = np.asarray(u, dtype=np.float64).ravel()
    return rescale_input(x, settings.input_range) if settings.rescale else x


def _target_matrix(
    u: NDArray[np.float64],
    warmup: int,
    terms: list[tuple[int, int]],
) -> NDArray[np.float64]:
    return np.column_stack([legendre_target(i, k, u)[warmup:] for i, k in terms])


def _capacities(
    train_states: StateMatrix,
    test_states: StateMatrix,
    train_targets: NDArray[np.float64],
    test_targets: NDArray[np.float64],
    settings: CapacitySettings,
) -> NDArray[np.float64]:
    lambdas = select_lambda(train_states, train_targets, settings.lambda_grid, settings.folds)
    values = np.zeros(train_targets.shape[1])
    variance = test_targets.var(axis=0)
    for ridge_lambda in np.unique(lambdas):
        columns = np.flatnonzero(lambdas == ridge_lambda)
        model = train_ridge(train_states, train_targets[:, columns], float(ridge_lambda))
        residual = test_states @ model.weights - test_targets[:, columns]
        error = np.mean(residual**2, axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            values[columns] = np.where(variance[columns] > 0, 1.0 - error / variance[columns], 0.0)
    values = np.maximum(values, 0.0)
    values[values < settings.threshold(test_states.shape[0])] = 0.0
    return values


def _check_alignment(states: StateMatrix, u: NDArray[np.float64], warmup: int, name: str) -> None:
    if u.size - warmup != states.shape[0]:
        raise PreconditionError(
            f"{name}: {u.size} inputs minus warm-up {warmup} do not match {states.shape[0]} state rows"
        )


def capacity(
    train_states: StateMatrix,
    test_states: StateMatrix,
    u_train: ArrayLike,
    u_test: ArrayLike,
    order: int,
    delay: int,
    warmup: int = 0,
    settings: Optional[CapacitySettings] = None,
) -> float:
    """C[y_k] for one (order, delay); inputs include the ``warmup`` leading samples."""
    settings = settings or CapacitySettings()
    x_train, x_test = _prepare(u_train, settings), _prepare(u_test, settings)
    _check_alignment(train_states, x_train, warmup, "train")
    _check_alignment(test_states, x_test, warmup, "test")
    terms = [(order, delay)]
    return float(
        _capacities(
            train_states,
            test_states,
            _target_matrix(x_train, warmup, terms),
            _target_matrix(x_test, warmup, terms),
            settings,
        )[0]
    )


@dataclass(frozen=True)
class CapacityReport:
    """C_i[k] for k = 1..k_max per order."""

    curves: dict[int, NDArray[np.float64]] = field(repr=False)
    k_max: int
    noise_floor: float

    @property
    def sums(self) -> dict[int, float]:
        return {order: float(np.sum(curve)) for order, curve in self.curves.items()}

    @property
    def total(self) -> float:
        return float(sum(self.sums.values()))

    def order_sum(self, order: int) -> Optional[float]:
        return self.sums.get(order)

    def rows(self) -> list[list[str]]:
        rows: list[list[str]] = []
        for order in sorted(self.curves):
            for k, value in enumerate(self.curves[order], start=1):
                rows.append([str(order), str(k), f"{value:.10g}"])
        for order, total in sorted(self.sums.items()):
            rows.append([str(order), "sum", f"{total:.10g}"])
        rows.append(["all", "sum", f"{self.total:.10g}"])
        return rows

    def write_csv(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["order", "k", "C"])
            writer.writerows(self.rows())
        return path


def capacity_curves(
    train_states: StateMatrix,
    test_states: StateMatrix,
    u_train: ArrayLike,
    u_test: ArrayLike,
    warmup: int = 0,
    settings: Optional[CapacitySettings] = None,
) -> CapacityReport:
    """Every (order, k) capacity from one pair of state matrices."""
    settings = settings or CapacitySettings()
    if settings.k_max < 1:
        raise PreconditionError(f"k_max must be >= 1, got {settings.k_max}")
    x_train, x_test = _prepare(u_train, settings), _prepare(u_test, settings)
    _check_alignment(train_states, x_train, warmup, "train")
    _check_alignment(test_states, x_test, warmup, "test")

    terms = [(i, k) for i in settings.orders for k in range(1, settings.k_max + 1)]
    values = _capacities(
        train_states,
        test_states,
        _target_matrix(x_train, warmup, terms),
        _target_matrix(x_test, warmup, terms),
        settings,
    )
    curves = {
        order: values[n * settings.k_max : (n + 1) * settings.k_max]
        for n, order in enumerate(settings.orders)
    }
    return CapacityReport(
        curves=curves,
        k_max=settings.k_max,
        noise_floor=settings.threshold(test_states.shape[0]),
    )


def total_memory_capacity(
    run_states: StateSource,
    u_train: ArrayLike,
    u_test: ArrayLike,
    warmup: int = 0,
    settings: Optional[CapacitySettings] = None,
) -> CapacityReport:
    """Drive the reservoir with both segments and collect every capacity.

    ``run_states(u, warmup)`` must return the state matrix of ``u`` without its
    first ``warmup`` rows.
    """
    settings = settings or CapacitySettings()
    with tracer.start_as_current_span("memory_capacity") as span:
        x_train = np.asarray(u_train, dtype=np.float64).ravel()
        x_test = np.asarray(u_test, dtype=np.float64).ravel()
        report = capacity_curves(
            run_states(x_train, warmup),
            run_states(x_test, warmup),
            x_train,
            x_test,
            warmup,
            settings,
        )
        span.set_attribute("memory_capacity", report.total)
    logger.debug(f"Memory capacity {report.total:.3f} ({report.sums})")
    return report
