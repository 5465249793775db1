"""
NARMA-10 one-step-ahead prediction.

    y(n+1) = 0.3 y(n) + 0.05 y(n) sum_{i=0}^{9} y(n-i) + 1.5 u(n-9) u(n) + 0.1

with u ~ U[0, 0.5] and zero history. State row n (driven by u(n)) regresses
onto y(n+1).
"""

import logging
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringres.errors import PreconditionError, RingresError
from ringres.tasks.base import Split, TaskDataset, TaskMetadata, TaskPlugin, resolve_split

logger = logging.getLogger(__name__)

ORDER = 10
INPUT_HIGH = 0.5
DIVERGENCE_BOUND = 10.0
MAX_REDRAWS = 100
NARMA10_SPLIT = Split(warmup=200, train=2000, test=2000)


def narma10_series(u: ArrayLike) -> NDArray[np.float64]:
    """Iterate the recurrence over ``u``; y(0..9) stay zero."""
    drive = np.asarray(u, dtype=np.float64).ravel()
    y = np.zeros(drive.size)
    for n in range(ORDER - 1, drive.size - 1):
        window = float(np.sum(y[n - ORDER + 1 : n + 1]))
        y[n + 1] = (
            0.3 * y[n]
            + 0.05 * y[n] * window
            + 1.5 * drive[n - ORDER + 1] * drive[n]
            + 0.1
        )
    return y


def _diverged(y: NDArray[np.float64]) -> bool:
    return bool(not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_BOUND)


def gen_narma10(
    length: Optional[int] = None,
    seed: int = 0,
    split: Optional[Split] = None,
) -> TaskDataset:
    """NARMA-10 dataset of ``length`` samples (default: the standard 200/2000/200/2000 layout).

    A diverging draw is replaced by the draw of the next seed; the seed that was
    finally used is recorded in ``metadata["seed_used"]``.
    """
    layout = resolve_split(length, split, NARMA10_SPLIT)
    if layout.total < ORDER:
        raise PreconditionError(f"NARMA-10 needs at least {ORDER} samples, got {layout.total}")

    for attempt in range(MAX_REDRAWS):
        used = seed + attempt
        rng = np.random.default_rng(used)
        # one extra sample so the last row still has its y(n+1)
        u = rng.uniform(0.0, INPUT_HIGH, size=layout.total + 1)
        y = narma10_series(u)
        if not _diverged(y):
            break
        logger.warning(f"NARMA-10 diverged for seed {used}, redrawing with seed {used + 1}")
    else:
        raise RingresError(f"NARMA-10 diverged for seeds {seed}..{seed + MAX_REDRAWS - 1}")

    return TaskDataset(
        name="narma10",
        inputs=u[:-1],
        targets=y[1:],
        split=layout,
        metric_kind="nmse",
        seed=seed,
        metadata={"seed_used": used, "substituted": used != seed},
    )


class Narma10Task(TaskPlugin):
    split: Split

    @property
    def metadata(self) -> TaskMetadata:
        return TaskMetadata(
            name="narma10",
            version="1.0.0",
            description="NARMA-10 one-step-ahead prediction",
            metric="nmse",
            parameters={
                "warmup": {
                    "type": "int",
                    "default": NARMA10_SPLIT.warmup,
                    "description": "Warm-up symbols before each segment",
                    "required": False,
                },
                "train": {
                    "type": "int",
                    "default": NARMA10_SPLIT.train,
                    "description": "Training symbols",
                    "required": False,
                },
                "test": {
                    "type": "int",
                    "default": NARMA10_SPLIT.test,
                    "description": "Testing symbols",
                    "required": False,
                },
            },
        )

    def initialize(self, config: dict[str, Any]) -> None:
        self.split = self._split_from(config, NARMA10_SPLIT)

    def generate(self, seed: int) -> TaskDataset:
        return gen_narma10(seed=seed, split=self.split)

    def validate(self) -> list[str]:
        if self.split.total < ORDER:
            return [f"narma10 needs at least {ORDER} samples"]
        return []
