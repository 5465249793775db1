import math
from dataclasses import dataclass, replace
from typing import Iterator, Mapping, Sequence, Union

from ringres.errors import ConfigError

AxisSpec = Union[Sequence[float], Mapping[str, float]]

TASK_CHOICES = ("narma10", "classify", "equalize", "radar", "capacity", "detuning")


def axis_points(spec: AxisSpec, name: str = "axis") -> tuple[float, ...]:
    """Explicit list, or ``{start, stop, step}`` with both ends included."""
    if isinstance(spec, Mapping):
        start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        if step <= 0 or stop < start:
            raise ConfigError(f"{name}: need step > 0 and stop >= start, got {dict(spec)}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 9) for i in range(count))
    return tuple(float(v) for v in spec)


def dbm_to_watts(power_dbm: float) -> float:
    return 1e-3 * 10.0 ** (power_dbm / 10.0)


def ghz_to_rad_per_s(detuning_ghz: float) -> float:
    return 2.0 * math.pi * detuning_ghz * 1e9


@dataclass(frozen=True, order=True)
class GridPoint:
    carrier_lifetime: float
    power_dbm: float
    detuning_ghz: float

    @property
    def key(self) -> str:
        return f"{self.carrier_lifetime:.6e}|{self.power_dbm:.6f}|{self.detuning_ghz:.6f}"

    @property
    def power_w(self) -> float:
        return dbm_to_watts(self.power_dbm)

    @property
    def detuning_rad_s(self) -> float:
        return ghz_to_rad_per_s(self.detuning_ghz)


@dataclass(frozen=True)
class SweepGrid:
    power_points: tuple[float, ...]
    detuning_points: tuple[float, ...]
    carrier_lifetimes: tuple[float, ...] = (10e-12, 10e-9, 25e-9)
    thermal_time: float = 50e-9
    seeds: tuple[int, ...] = tuple(range(10))
    tasks: tuple[str, ...] = ("narma10", "capacity")

    def __post_init__(self) -> None:
        errors = self.validate()
        if errors:
            raise ConfigError("; ".join(errors), errors)

    def validate(self) -> list[str]:
        errors: list[str] = []
        for name in ("power_points", "detuning_points", "carrier_lifetimes", "tasks"):
            if not getattr(self, name):
                errors.append(f"sweep axis '{name}' is empty")
        if len(self.seeds) < 1:
            errors.append("sweep needs at least one seed")
        if any(t <= 0 for t in self.carrier_lifetimes) or self.thermal_time <= 0:
            errors.append("carrier lifetimes and thermal time must be > 0")
        unknown = [t for t in self.tasks if t not in TASK_CHOICES]
        if unknown:
            errors.append(f"unknown sweep tasks {unknown}; choose from {list(TASK_CHOICES)}")
        return errors

    @property
    def size(self) -> int:
        return len(self.carrier_lifetimes) * len(self.power_points) * len(self.detuning_points)

    def points(self) -> Iterator[GridPoint]:
        """Lifetime-major, then power, then detuning."""
        for tau in self.carrier_lifetimes:
            for power in self.power_points:
                for detuning in self.detuning_points:
                    yield GridPoint(tau, power, detuning)

    def with_power(self, power_dbm: float) -> "SweepGrid":
        return replace(self, power_points=(float(power_dbm),))
