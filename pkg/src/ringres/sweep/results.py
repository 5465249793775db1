import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ringres.cavity.state import DetuningTrace
from ringres.errors import PreconditionError
from ringres.sweep.grid import GridPoint
from ringres.types import CapacityRecord, PointStatus, Region, SweepRecord, TaskRecord

REGION_A_SIGMA_HZ = 10e6


def _mean(values: Sequence[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def _std(values: Sequence[float]) -> Optional[float]:
    return float(np.std(values)) if values else None


@dataclass(frozen=True)
class TaskSummary:
    """One task at one grid point, aggregated over seeds."""

    metric: str
    per_seed: tuple[float, ...]
    bias: tuple[float, ...] = ()
    ridge_lambda: tuple[float, ...] = ()
    subsets: tuple[tuple[float, ...], ...] = ()
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def mean(self) -> Optional[float]:
        return _mean(self.per_seed)

    @property
    def std(self) -> Optional[float]:
        return _std(self.per_seed)

    def to_record(self) -> TaskRecord:
        return TaskRecord(
            metric=self.metric,
            mean=self.mean,
            std=self.std,
            per_seed=list(self.per_seed),
            bias=list(self.bias),
            ridge_lambda=list(self.ridge_lambda),
            subsets=[list(s) for s in self.subsets],
            extras=dict(self.extras),
        )

    @classmethod
    def from_record(cls, record: TaskRecord) -> "TaskSummary":
        return cls(
            metric=record["metric"],
            per_seed=tuple(record["per_seed"]),
            bias=tuple(record["bias"]),
            ridge_lambda=tuple(record["ridge_lambda"]),
            subsets=tuple(tuple(s) for s in record["subsets"]),
            extras=dict(record["extras"]),
        )


@dataclass(frozen=True)
class CapacitySummary:
    orders: dict[int, float]
    per_seed: tuple[float, ...]

    @property
    def total(self) -> Optional[float]:
        return _mean(self.per_seed)

    @property
    def std(self) -> Optional[float]:
        return _std(self.per_seed)

    def to_record(self) -> CapacityRecord:
        return CapacityRecord(
            orders={str(k): v for k, v in sorted(self.orders.items())},
            total=self.total,
            per_seed=list(self.per_seed),
        )

    @classmethod
    def from_record(cls, record: CapacityRecord) -> "CapacitySummary":
        return cls(
            orders={int(k): float(v) for k, v in record["orders"].items()},
            per_seed=tuple(record["per_seed"]),
        )


@dataclass(frozen=True)
class SweepResult:
    point: GridPoint
    status: PointStatus = "ok"
    tasks: dict[str, TaskSummary] = field(default_factory=dict)
    capacity: Optional[CapacitySummary] = None
    sigma_delta_nl: Optional[float] = None
    oscillation_depth: Optional[float] = None
    self_pulsing: Optional[bool] = None
    region: Region = "unclassified"
    error: Optional[str] = None
    wall_time: float = 0.0

    @property
    def failed(self) -> bool:
        return self.status == "failed"

    def with_region(self, sigma_threshold: float = REGION_A_SIGMA_HZ) -> "SweepResult":
        return replace(self, region=classify_region(self, sigma_threshold))

    def to_record(self) -> SweepRecord:
        return SweepRecord(
            carrier_lifetime=self.point.carrier_lifetime,
            power_dbm=self.point.power_dbm,
            detuning_ghz=self.point.detuning_ghz,
            status=self.status,
            tasks={name: summary.to_record() for name, summary in sorted(self.tasks.items())},
            capacity=None if self.capacity is None else self.capacity.to_record(),
            sigma_delta_nl_hz=self.sigma_delta_nl,
            oscillation_depth=self.oscillation_depth,
            self_pulsing=self.self_pulsing,
            region=self.region,
            error=self.error,
            wall_time_s=self.wall_time,
        )

    @classmethod
    def from_record(cls, record: SweepRecord) -> "SweepResult":
        capacity = record.get("capacity")
        return cls(
            point=GridPoint(
                float(record["carrier_lifetime"]),
                float(record["power_dbm"]),
                float(record["detuning_ghz"]),
            ),
            status=record["status"],
            tasks={
                name: TaskSummary.from_record(task) for name, task in record["tasks"].items()
            },
            capacity=None if capacity is None else CapacitySummary.from_record(capacity),
            sigma_delta_nl=record["sigma_delta_nl_hz"],
            oscillation_depth=record["oscillation_depth"],
            self_pulsing=record["self_pulsing"],
            region=record["region"],
            error=record["error"],
            wall_time=float(record["wall_time_s"]),
        )


def sigma_delta_nl(trace: DetuningTrace) -> float:
    """Population standard deviation of delta_NL over the whole trace, in Hz."""
    if len(trace) == 0:
        raise PreconditionError("detuning trace is empty")
    return trace.sigma


def classify_region(row: SweepResult, sigma_threshold: float = REGION_A_SIGMA_HZ) -> Region:
    """C when self-pulsing, A when nearly linear, B otherwise."""
    if row.failed:
        return "unclassified"
    if row.self_pulsing:
        return "C"
    if row.sigma_delta_nl is None or not math.isfinite(row.sigma_delta_nl):
        return "unclassified"
    return "A" if row.sigma_delta_nl < sigma_threshold else "B"
