"""
Sea-clutter radar prediction.

The complex return I + jQ is flattened by interleaving, I(0), Q(0), I(1), ...,
and the reservoir predicts the flattened stream ``horizon`` steps ahead.
Recordings are read from a CSV file with an ``i,q`` header. Without a
recording, ``gen_surrogate_radar`` produces compound-K clutter: complex
Gaussian speckle with short correlation, modulated by a slowly varying
gamma-distributed texture.
"""

import csv
import math
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringres.errors import DataIngestionError, PreconditionError
from ringres.tasks.base import (
    Split,
    TaskDataset,
    TaskMetadata,
    TaskPlugin,
    fit_conditioning,
    resolve_split,
)

RADAR_SPLIT = Split(warmup=200, train=1000, test=1000)
HORIZONS = (1, 2)
HEADER = ("i", "q")

SPECKLE_CORRELATION = 0.95
TEXTURE_CORRELATION = 0.999
TEXTURE_SHAPE = 2


def flatten_iq(in_phase: ArrayLike, quadrature: ArrayLike) -> NDArray[np.float64]:
    i = np.asarray(in_phase, dtype=np.float64).ravel()
    q = np.asarray(quadrature, dtype=np.float64).ravel()
    if i.shape != q.shape:
        raise PreconditionError(f"I has {i.size} samples, Q has {q.size}")
    return np.column_stack((i, q)).ravel()


def horizon_pairs(flat: ArrayLike, horizon: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """(inputs, targets) with targets running ``horizon`` samples ahead."""
    stream = np.asarray(flat, dtype=np.float64).ravel()
    if horizon not in HORIZONS:
        raise PreconditionError(f"horizon must be one of {HORIZONS}, got {horizon}")
    if stream.size <= horizon:
        raise PreconditionError(f"stream of {stream.size} samples is too short for k={horizon}")
    return stream[:-horizon], stream[horizon:]


def read_iq_csv(path: Union[str, Path]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    source = Path(path)
    if not source.is_file():
        raise DataIngestionError("radar file does not exist", str(source))

    in_phase: list[float] = []
    quadrature: list[float] = []
    with source.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise DataIngestionError("radar file is empty", str(source), 1)
        if tuple(column.strip().lower() for column in header) != HEADER:
            raise DataIngestionError(
                f"expected header 'i,q', got '{','.join(header)}'", str(source), 1
            )
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise DataIngestionError(f"expected 2 columns, got {len(row)}", str(source), line)
            try:
                i_value, q_value = float(row[0]), float(row[1])
            except ValueError:
                raise DataIngestionError(f"non-numeric value in '{','.join(row)}'", str(source), line)
            if not (math.isfinite(i_value) and math.isfinite(q_value)):
                raise DataIngestionError("non-finite value", str(source), line)
            in_phase.append(i_value)
            quadrature.append(q_value)
    return np.asarray(in_phase), np.asarray(quadrature)


def _radar_dataset(
    flat: NDArray[np.float64],
    horizon: int,
    layout: Split,
    seed: int,
    metadata: dict[str, Any],
) -> TaskDataset:
    inputs, targets = horizon_pairs(flat, horizon)
    inputs = inputs[: layout.total]
    targets = targets[: layout.total]
    preshift, scale = fit_conditioning(inputs[: layout.warmup + layout.train])
    return TaskDataset(
        name="radar",
        inputs=inputs,
        targets=targets,
        split=layout,
        metric_kind="nmse",
        input_bias_preshift=preshift,
        input_scale=scale,
        # the modulator cannot go below zero power
        input_floor=0.0,
        seed=seed,
        metadata={"horizon": horizon, **metadata},
    )


def load_radar(
    path: Union[str, Path],
    horizon: int = 1,
    split: Optional[Split] = RADAR_SPLIT,
) -> TaskDataset:
    """Load a recording; ``split=None`` uses every available sample for training."""
    in_phase, quadrature = read_iq_csv(path)
    flat = flatten_iq(in_phase, quadrature)
    available = flat.size - horizon
    layout = Split.whole(available) if split is None else split
    if available < max(layout.total, 1):
        raise DataIngestionError(
            f"{in_phase.size} complex samples give {max(available, 0)} pairs for k={horizon}, "
            f"need {layout.total}",
            str(path),
        )
    return _radar_dataset(flat, horizon, layout, 0, {"source": str(path)})


def surrogate_clutter(length: int, seed: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """I and Q of ``length`` compound-K clutter samples."""
    if length < 2:
        raise PreconditionError(f"surrogate radar needs L >= 2, got {length}")
    rng = np.random.default_rng(seed)

    def ar1(rho: float, shape: tuple[int, ...]) -> NDArray[np.float64]:
        drive = rng.standard_normal(shape) * math.sqrt(1.0 - rho**2)
        out = np.empty(shape)
        out[0] = rng.standard_normal(shape[1:])
        for n in range(1, shape[0]):
            out[n] = rho * out[n - 1] + drive[n]
        return out

    # sum of 2*shape squared unit Gaussians / (2*shape) is Gamma(shape, 1/shape)
    texture_parts = ar1(TEXTURE_CORRELATION, (length, 2 * TEXTURE_SHAPE))
    texture = np.mean(texture_parts**2, axis=1)
    speckle = ar1(SPECKLE_CORRELATION, (length, 2)) / math.sqrt(2.0)
    amplitude = np.sqrt(texture)
    return amplitude * speckle[:, 0], amplitude * speckle[:, 1]


def gen_surrogate_radar(
    length: Optional[int] = None,
    seed: int = 0,
    horizon: int = 1,
    split: Optional[Split] = None,
) -> TaskDataset:
    """Synthetic clutter through the same flattening and horizon shift as ``load_radar``.

    ``length`` counts complex samples; by default enough are drawn for the
    standard 1000/1000 layout.
    """
    if length is None:
        layout = split or RADAR_SPLIT
        length = math.ceil((layout.total + horizon) / 2)
    else:
        layout = resolve_split(None, split, Split.whole(2 * length - horizon))
    flat = flatten_iq(*surrogate_clutter(length, seed))
    if flat.size - horizon < layout.total:
        raise PreconditionError(
            f"{length} complex samples are too few for a split of {layout.total}"
        )
    return _radar_dataset(flat, horizon, layout, seed, {"source": "surrogate"})


class RadarTask(TaskPlugin):
    split: Split
    horizon: int
    path: Optional[str]
    surrogate: bool

    @property
    def metadata(self) -> TaskMetadata:
        return TaskMetadata(
            name="radar",
            version="1.0.0",
            description="Sea-clutter radar prediction k steps ahead",
            metric="nmse",
            parameters={
                "path": {
                    "type": "str",
                    "default": None,
                    "description": "CSV recording with header i,q",
                    "required": False,
                },
                "horizon": {
                    "type": "int",
                    "default": 1,
                    "description": "Prediction horizon k (1 or 2)",
                    "required": False,
                },
                "surrogate": {
                    "type": "bool",
                    "default": False,
                    "description": "Use synthetic clutter when no recording is given",
                    "required": False,
                },
            },
        )

    def initialize(self, config: dict[str, Any]) -> None:
        self.split = self._split_from(config, RADAR_SPLIT)
        self.horizon = int(config.get("horizon", 1))
        path = config.get("path")
        self.path = str(path) if path else None
        self.surrogate = bool(config.get("surrogate", False))

    def generate(self, seed: int) -> TaskDataset:
        if self.path:
            return load_radar(self.path, self.horizon, self.split)
        return gen_surrogate_radar(seed=seed, horizon=self.horizon, split=self.split)

    def validate(self) -> list[str]:
        errors: list[str] = []
        if self.horizon not in HORIZONS:
            errors.append(f"radar.horizon must be one of {HORIZONS}, got {self.horizon}")
        if not self.path and not self.surrogate:
            errors.append("radar needs tasks.radar.path or tasks.radar.surrogate: true")
        return errors
