from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, TypedDict

import numpy as np
from numpy.typing import NDArray

from ringres.errors import ConfigError, PreconditionError
from ringres.readout.metrics import MetricKind

MaskRange = tuple[float, float]


class Parameter(TypedDict):
    type: Literal["int", "float", "str", "bool"]
    default: Any
    description: str
    required: bool


class TaskMetadata(TypedDict):
    name: str
    version: str
    description: str
    metric: MetricKind
    parameters: dict[str, Parameter]


@dataclass(frozen=True)
class Split:
    """Sample counts of a dataset.

    Layout: ``[warmup, train]`` followed by ``test_subsets`` blocks of
    ``[warmup, test / test_subsets]``; every block is simulated from the cold
    cavity.
    """

    warmup: int = 200
    train: int = 2000
    test: int = 2000
    test_subsets: int = 1

    def __post_init__(self) -> None:
        errors: list[str] = []
        if self.warmup < 0 or self.train < 0 or self.test < 0:
            errors.append(f"split sizes must be >= 0, got {self}")
        if self.test_subsets < 1:
            errors.append(f"test_subsets must be >= 1, got {self.test_subsets}")
        elif self.test % self.test_subsets:
            errors.append(f"test={self.test} does not divide into {self.test_subsets} subsets")
        if errors:
            raise ConfigError("; ".join(errors), errors)

    @property
    def subset_size(self) -> int:
        return self.test // self.test_subsets

    @property
    def blocks(self) -> int:
        return self.test_subsets if self.test else 0

    @property
    def total(self) -> int:
        return self.warmup + self.train + self.blocks * (self.warmup + self.subset_size)

    @classmethod
    def whole(cls, length: int) -> "Split":
        """Everything is training data, nothing is discarded."""
        return cls(warmup=0, train=length, test=0)


def resolve_split(length: Optional[int], split: Optional[Split], default: Split) -> Split:
    if split is None:
        return default if length is None else Split.whole(length)
    if length is not None and length != split.total:
        raise PreconditionError(f"length {length} does not match split total {split.total}")
    return split


@dataclass(frozen=True)
class Segment:
    name: str
    inputs: NDArray[np.float64]
    targets: NDArray[np.float64]
    warmup: int
    groups: Optional[NDArray[np.int64]] = None

    @property
    def kept_targets(self) -> NDArray[np.float64]:
        return self.targets[self.warmup :]

    @property
    def kept_groups(self) -> Optional[NDArray[np.int64]]:
        return None if self.groups is None else self.groups[self.warmup :]


@dataclass(frozen=True)
class TaskDataset:
    """Input/target sequences of one benchmark, laid out as described by ``split``.

    The reservoir sees ``(inputs + input_bias_preshift) * input_scale``, raised to
    ``input_floor`` when one is set. The conditioning is fitted on the training
    segment, so test samples outside the training range are clipped there.
    """

    name: str
    inputs: NDArray[np.float64]
    targets: NDArray[np.float64]
    split: Split
    metric_kind: MetricKind
    mask_range: MaskRange = (0.0, 1.0)
    input_bias_preshift: float = 0.0
    input_scale: float = 1.0
    input_floor: Optional[float] = None
    groups: Optional[NDArray[np.int64]] = None
    seed: int = 0
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.inputs.shape != self.targets.shape or self.inputs.ndim != 1:
            raise PreconditionError(
                f"inputs {self.inputs.shape} and targets {self.targets.shape} must be equal 1-D"
            )
        if self.inputs.size != self.split.total:
            raise PreconditionError(
                f"{self.name}: {self.inputs.size} samples do not match split total {self.split.total}"
            )
        if not (np.all(np.isfinite(self.inputs)) and np.all(np.isfinite(self.targets))):
            raise PreconditionError(f"{self.name}: sequences contain non-finite values")

    @property
    def warmup_len(self) -> int:
        return self.split.warmup

    @property
    def train_len(self) -> int:
        return self.split.train

    @property
    def test_len(self) -> int:
        return self.split.test

    def conditioned(self, values: NDArray[np.float64]) -> NDArray[np.float64]:
        conditioned = (values + self.input_bias_preshift) * self.input_scale
        if self.input_floor is None:
            return conditioned
        return np.maximum(conditioned, self.input_floor)

    def _segment(self, name: str, start: int, size: int) -> Segment:
        stop = start + self.split.warmup + size
        groups = None if self.groups is None else self.groups[start:stop]
        return Segment(
            name=name,
            inputs=self.conditioned(self.inputs[start:stop]),
            targets=self.targets[start:stop],
            warmup=self.split.warmup,
            groups=groups,
        )

    def train_segment(self) -> Segment:
        return self._segment("train", 0, self.split.train)

    def test_segments(self) -> list[Segment]:
        segments: list[Segment] = []
        start = self.split.warmup + self.split.train
        for i in range(self.split.blocks):
            segments.append(self._segment(f"test{i}", start, self.split.subset_size))
            start += self.split.warmup + self.split.subset_size
        return segments


def fit_conditioning(train_values: NDArray[np.float64]) -> tuple[float, float]:
    """(preshift, scale) mapping the training range onto [0, 1]."""
    low = float(np.min(train_values))
    high = float(np.max(train_values))
    span = high - low
    return -low, (1.0 / span if span > 0 else 1.0)


class TaskPlugin(ABC):
    @property
    @abstractmethod
    def metadata(self) -> TaskMetadata:
        raise NotImplementedError

    @abstractmethod
    def initialize(self, config: dict[str, Any]) -> None:
        raise NotImplementedError

    @abstractmethod
    def generate(self, seed: int) -> TaskDataset:
        raise NotImplementedError

    @abstractmethod
    def validate(self) -> list[str]:
        raise NotImplementedError

    @property
    def metric_kind(self) -> MetricKind:
        return self.metadata["metric"]

    @staticmethod
    def _split_from(config: dict[str, Any], default: Split) -> Split:
        return Split(
            warmup=int(config.get("warmup", default.warmup)),
            train=int(config.get("train", default.train)),
            test=int(config.get("test", default.test)),
            test_subsets=int(config.get("test_subsets", default.test_subsets)),
        )
