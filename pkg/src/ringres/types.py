from typing import Literal, Optional, TypedDict

PointStatus = Literal["ok", "failed"]
Region = Literal["A", "B", "C", "unclassified"]


class TaskRecord(TypedDict):
    metric: str
    mean: Optional[float]
    std: Optional[float]
    per_seed: list[float]
    bias: list[float]
    ridge_lambda: list[float]
    subsets: list[list[float]]
    extras: dict[str, float]


class CapacityRecord(TypedDict):
    orders: dict[str, float]
    total: Optional[float]
    per_seed: list[float]


class SweepRecord(TypedDict):
    carrier_lifetime: float
    power_dbm: float
    detuning_ghz: float
    status: PointStatus
    tasks: dict[str, TaskRecord]
    capacity: Optional[CapacityRecord]
    sigma_delta_nl_hz: Optional[float]
    oscillation_depth: Optional[float]
    self_pulsing: Optional[bool]
    region: Region
    error: Optional[str]
    wall_time_s: float


class Manifest(TypedDict):
    config_hash: str
    version: str
    seeds: list[int]
    carrier_lifetimes: list[float]
    points: int
    failed_points: int
    tasks: list[str]
