"""
Shared builders for the simulator tests.

The default cavity with a 10 ns carrier lifetime integrates at 1 ps. Test
reservoirs use 10 virtual nodes at 5 GBd, i.e. 20 integration steps per node,
which keeps a few hundred symbols well below a second of compiled time.
"""

import copy
from typing import Any, Callable, Type

import numpy as np
import pytest

from ringres.cavity.params import CavityDesign, PhysicalParams
from ringres.config import DEFAULTS, deep_merge
from ringres.reservoir.mask import Mask
from ringres.reservoir.modulation import ModulationConfig
from ringres.tasks.base import TaskPlugin

SMALL_NODES = 10
SMALL_SYMBOL_RATE = 5.0e9


def default_params(**changes: Any) -> PhysicalParams:
    params = PhysicalParams.from_design(CavityDesign())
    return params.replace(**changes) if changes else params


def small_modulation(**changes: Any) -> ModulationConfig:
    return ModulationConfig(
        symbol_rate=SMALL_SYMBOL_RATE,
        node_count=SMALL_NODES,
        **changes,
    )


def small_mask(seed: int = 0) -> Mask:
    return Mask.generate(SMALL_NODES, seed)


def delay_line_states(u: np.ndarray, taps: int, warmup: int = 0) -> np.ndarray:
    """State rows [u(n-1), ..., u(n-taps), 1]: an ideal fading-memory reservoir."""
    columns = [np.concatenate([np.zeros(k), u[: u.size - k]]) for k in range(1, taps + 1)]
    states = np.column_stack(columns + [np.ones(u.size)])
    return states[warmup:]


def tiny_document(**sections: Any) -> dict[str, Any]:
    """Default run configuration shrunk to a seconds-long single point."""
    document = deep_merge(
        copy.deepcopy(DEFAULTS),
        {
            "modulation": {"symbol_rate": SMALL_SYMBOL_RATE, "node_count": SMALL_NODES},
            "readout": {"lambda_grid": [1.0e-8, 1.0e-4], "folds": 3},
            "capacity": {"k_max": 5},
            "tasks": {
                "bias_grid": [0.5],
                "narma10": {"warmup": 20, "train": 200, "test": 100},
            },
            "sweep": {
                "power_dbm": [0.0],
                "detuning_ghz": [0.0],
                "carrier_lifetimes": [1.0e-8],
                "seeds": 1,
                "tasks": ["narma10"],
                "self_pulsing": {"enabled": False},
            },
        },
    )
    return deep_merge(document, sections)


def task_fixture(task_class: Type[TaskPlugin]) -> Callable:
    """Fixture factory returning a fresh, uninitialised task plugin."""

    @pytest.fixture
    def _task() -> TaskPlugin:
        return task_class()

    return _task
