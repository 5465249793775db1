from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

UNIPOLAR = (0.0, 1.0)
BIPOLAR = (-1.0, 1.0)


@dataclass(frozen=True)
class Mask:
    """Input mask of N virtual-node weights, drawn uniformly from ``value_range``."""

    values: NDArray[np.float64] = field(repr=False)
    seed: int
    value_range: tuple[float, float] = UNIPOLAR

    @classmethod
    def generate(
        cls,
        node_count: int,
        seed: int,
        value_range: tuple[float, float] = UNIPOLAR,
    ) -> "Mask":
        if node_count < 1:
            raise ValueError(f"node_count must be >= 1, got {node_count}")
        low, high = value_range
        if not low < high:
            raise ValueError(f"mask range must satisfy low < high, got {value_range}")
        rng = np.random.default_rng(seed)
        values = rng.uniform(low, high, size=node_count)
        return cls(values=values, seed=seed, value_range=(float(low), float(high)))

    @property
    def node_count(self) -> int:
        return int(self.values.size)

    @property
    def signed(self) -> bool:
        return self.value_range[0] < 0.0

    def __len__(self) -> int:
        return self.node_count
