import math
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from ringres.errors import PreconditionError
from ringres.tasks.base import Split, TaskDataset, TaskMetadata, TaskPlugin

POINTS_PER_PERIOD = 12
CLASSIFY_SPLIT = Split(warmup=200, train=2000, test=1000)

SINE_PERIOD = np.sin(2.0 * np.pi * np.arange(POINTS_PER_PERIOD) / POINTS_PER_PERIOD)
SQUARE_PERIOD = np.where(np.arange(POINTS_PER_PERIOD) < POINTS_PER_PERIOD // 2, 1.0, -1.0)


def waveform_sequence(
    num_periods: int,
    rng: np.random.Generator,
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.int64]]:
    """(samples, labels, period index); label 1 marks square periods."""
    if num_periods < 1:
        raise PreconditionError(f"num_periods must be >= 1, got {num_periods}")
    square = rng.random(num_periods) < 0.5
    samples = np.where(square[:, None], SQUARE_PERIOD[None, :], SINE_PERIOD[None, :]).ravel()
    labels = np.repeat(square.astype(np.float64), POINTS_PER_PERIOD)
    groups = np.repeat(np.arange(num_periods, dtype=np.int64), POINTS_PER_PERIOD)
    return samples, labels, groups


def gen_waveform_classification(
    num_periods: Optional[int] = None,
    seed: int = 0,
    split: Optional[Split] = None,
) -> TaskDataset:
    """Randomly ordered sine and square periods, 12 points each.

    Without a split the whole sequence is training data; with a split the
    periods are cut to its total (the default split needs 284 periods).
    """
    if split is None:
        if num_periods is None:
            split = CLASSIFY_SPLIT
        else:
            split = Split.whole(num_periods * POINTS_PER_PERIOD)
    needed = math.ceil(split.total / POINTS_PER_PERIOD)
    if num_periods is None:
        num_periods = needed
    elif num_periods < needed:
        raise PreconditionError(
            f"{num_periods} periods give {num_periods * POINTS_PER_PERIOD} samples, "
            f"split needs {split.total}"
        )

    rng = np.random.default_rng(seed)
    samples, labels, groups = waveform_sequence(num_periods, rng)
    total = split.total
    return TaskDataset(
        name="classify",
        inputs=samples[:total],
        targets=labels[:total],
        split=split,
        metric_kind="accuracy",
        input_bias_preshift=1.0,
        input_scale=0.5,
        groups=groups[:total],
        seed=seed,
        metadata={"num_periods": num_periods},
    )


class WaveformClassificationTask(TaskPlugin):
    split: Split

    @property
    def metadata(self) -> TaskMetadata:
        return TaskMetadata(
            name="classify",
            version="1.0.0",
            description="Sine versus square waveform classification",
            metric="accuracy",
            parameters={
                "train": {
                    "type": "int",
                    "default": CLASSIFY_SPLIT.train,
                    "description": "Training samples",
                    "required": False,
                },
                "test": {
                    "type": "int",
                    "default": CLASSIFY_SPLIT.test,
                    "description": "Testing samples",
                    "required": False,
                },
            },
        )

    def initialize(self, config: dict[str, Any]) -> None:
        self.split = self._split_from(config, CLASSIFY_SPLIT)

    def generate(self, seed: int) -> TaskDataset:
        return gen_waveform_classification(seed=seed, split=self.split)

    def validate(self) -> list[str]:
        if self.split.total < 1:
            return ["classify needs at least one sample"]
        return []
