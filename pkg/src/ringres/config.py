"""
Run configuration: a YAML document deep-merged over the built-in defaults,
checked against a JSON Schema and frozen into dataclasses.
"""

import copy
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import yaml
from jsonschema import Draft7Validator

from ringres.capacity import CapacitySettings
from ringres.cavity.params import CavityDesign, PhysicalParams
from ringres.errors import ConfigError
from ringres.reservoir.modulation import ModulationConfig
from ringres.sweep.grid import TASK_CHOICES, SweepGrid, axis_points
from ringres.tasks.evaluation import DEFAULT_BIAS_GRID, EvaluationSettings

logger = logging.getLogger(__name__)

DEFAULTS: dict[str, Any] = {
    "cavity": {
        "wavelength": 1.55e-6,
        "loaded_q": 3.0e4,
        "group_index": 4.2,
        "waveguide_loss_db_per_cm": 0.8,
        "silicon_index": 3.485,
        "thermo_optic_coefficient": 1.86e-4,
        "fcd_index_coefficient": -1.73e-27,
        "tpa_beta": 7.9e-12,
        "fca_cross_section": 1.0e-21,
        "mode_volume": 6.3e-18,
        "thermal_heating_efficiency": 9.7e10,
        "linear_absorption_fraction": 0.5,
    },
    "feedback": {
        "delay": 5.0e-10,
        "phase": 0.0,
        "amplitude_transmission": 1.0,
    },
    "integration": {
        "step": None,
    },
    "modulation": {
        "symbol_rate": 1.0e9,
        "node_count": 50,
        "mask_seed": 0,
        "detection_window": 0.25,
    },
    "readout": {
        "lambda_grid": [1.0e-12, 1.0e-10, 1.0e-8, 1.0e-6, 1.0e-4, 1.0e-2],
        "folds": 5,
        "validation_fraction": 0.2,
    },
    "capacity": {
        "orders": [1, 2, 3],
        "k_max": 50,
        "noise_threshold": None,
        "rescale": True,
        "bias": 0.5,
    },
    "tasks": {
        "bias_grid": list(DEFAULT_BIAS_GRID),
        "narma10": {"warmup": 200, "train": 2000, "test": 2000},
        "classify": {"warmup": 200, "train": 2000, "test": 1000},
        "equalize": {
            "warmup": 200,
            "train": 10000,
            "test": 100000,
            "test_subsets": 10,
            "snr_db": 32.0,
            "delay": 2,
        },
        "radar": {
            "warmup": 200,
            "train": 1000,
            "test": 1000,
            "horizon": 1,
            "path": None,
            "surrogate": False,
        },
    },
    "sweep": {
        "power_dbm": {"start": -20.0, "stop": 20.0, "step": 1.0},
        "detuning_ghz": {"start": -300.0, "stop": 300.0, "step": 10.0},
        "carrier_lifetimes": [1.0e-11, 1.0e-8, 2.5e-8],
        "thermal_time": 5.0e-8,
        "seeds": 10,
        "tasks": ["narma10", "capacity"],
        "region_a_sigma_hz": 1.0e7,
        "self_pulsing": {
            "enabled": True,
            "threshold": 0.05,
            "settle_thermal_times": 20.0,
            "observe_thermal_times": 5.0,
            "sample_steps": 10,
        },
    },
    "emit": {
        "log10_metrics": [],
    },
}

_NUMBER = {"type": "number"}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_COUNT = {"type": "integer", "minimum": 0}
_AXIS = {
    "oneOf": [
        {"type": "array", "items": _NUMBER, "minItems": 1},
        {
            "type": "object",
            "properties": {"start": _NUMBER, "stop": _NUMBER, "step": _POSITIVE},
            "required": ["start", "stop", "step"],
            "additionalProperties": False,
        },
    ]
}


def _section(properties: dict[str, Any]) -> dict[str, Any]:
    return {"type": "object", "properties": properties, "additionalProperties": False}


def _split_schema(**extra: Any) -> dict[str, Any]:
    return _section({"warmup": _COUNT, "train": _COUNT, "test": _COUNT, **extra})


SCHEMA: dict[str, Any] = _section(
    {
        "cavity": _section(
            {
                "wavelength": _POSITIVE,
                "loaded_q": _POSITIVE,
                "group_index": _POSITIVE,
                "waveguide_loss_db_per_cm": {"type": "number", "minimum": 0},
                "silicon_index": _POSITIVE,
                "thermo_optic_coefficient": _NUMBER,
                "fcd_index_coefficient": _NUMBER,
                "tpa_beta": {"type": "number", "minimum": 0},
                "fca_cross_section": {"type": "number", "minimum": 0},
                "mode_volume": _POSITIVE,
                "thermal_heating_efficiency": {"type": "number", "minimum": 0},
                "linear_absorption_fraction": {"type": "number", "minimum": 0, "maximum": 1},
            }
        ),
        "feedback": _section(
            {
                "delay": _POSITIVE,
                "phase": _NUMBER,
                "amplitude_transmission": {"type": "number", "minimum": 0, "maximum": 1},
            }
        ),
        "integration": _section({"step": {"oneOf": [_POSITIVE, {"type": "null"}]}}),
        "modulation": _section(
            {
                "symbol_rate": _POSITIVE,
                "node_count": {"type": "integer", "minimum": 1},
                "mask_seed": {"type": "integer"},
                "detection_window": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            }
        ),
        "readout": _section(
            {
                "lambda_grid": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 1,
                },
                "folds": {"type": "integer", "minimum": 2},
                "validation_fraction": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            }
        ),
        "capacity": _section(
            {
                "orders": {
                    "type": "array",
                    "items": {"enum": [1, 2, 3]},
                    "minItems": 1,
                    "uniqueItems": True,
                },
                "k_max": {"type": "integer", "minimum": 1},
                "noise_threshold": {"oneOf": [{"type": "number", "minimum": 0}, {"type": "null"}]},
                "rescale": {"type": "boolean"},
                "bias": {"type": "number", "minimum": 0},
            }
        ),
        "tasks": _section(
            {
                "bias_grid": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 1,
                },
                "narma10": _split_schema(),
                "classify": _split_schema(),
                "equalize": _split_schema(
                    test_subsets={"type": "integer", "minimum": 1},
                    snr_db=_NUMBER,
                    delay=_COUNT,
                ),
                "radar": _split_schema(
                    horizon={"enum": [1, 2]},
                    path={"type": ["string", "null"]},
                    surrogate={"type": "boolean"},
                ),
            }
        ),
        "sweep": _section(
            {
                "power_dbm": _AXIS,
                "detuning_ghz": _AXIS,
                "carrier_lifetimes": {"type": "array", "items": _POSITIVE, "minItems": 1},
                "thermal_time": _POSITIVE,
                "seeds": {
                    "oneOf": [
                        {"type": "integer", "minimum": 1},
                        {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                    ]
                },
                "tasks": {
                    "type": "array",
                    "items": {"enum": list(TASK_CHOICES)},
                    "minItems": 1,
                    "uniqueItems": True,
                },
                "region_a_sigma_hz": _POSITIVE,
                "self_pulsing": _section(
                    {
                        "enabled": {"type": "boolean"},
                        "threshold": _POSITIVE,
                        "settle_thermal_times": _POSITIVE,
                        "observe_thermal_times": _POSITIVE,
                        "sample_steps": {"type": "integer", "minimum": 1},
                    }
                ),
            }
        ),
        "emit": _section(
            {
                "log10_metrics": {"type": "array", "items": {"type": "string"}},
            }
        ),
    }
)


@dataclass(frozen=True)
class PulsingSettings:
    enabled: bool = True
    threshold: float = 0.05
    settle_thermal_times: float = 20.0
    observe_thermal_times: float = 5.0
    sample_steps: int = 10


@dataclass(frozen=True)
class RunConfig:
    design: CavityDesign
    integration_step: Optional[float]
    modulation: ModulationConfig
    mask_seed: int
    evaluation: EvaluationSettings
    capacity: CapacitySettings
    capacity_bias: float
    task_options: dict[str, dict[str, Any]]
    grid: SweepGrid
    region_a_sigma_hz: float
    pulsing: PulsingSettings
    log10_metrics: tuple[str, ...]
    document: dict[str, Any] = field(repr=False)

    @property
    def config_hash(self) -> str:
        return config_hash(self.document)

    def physical_params(
        self,
        carrier_lifetime: Optional[float] = None,
        pump_detuning: float = 0.0,
    ) -> PhysicalParams:
        return PhysicalParams.from_design(
            self.design,
            pump_detuning=pump_detuning,
            carrier_lifetime=carrier_lifetime,
            thermal_time=self.grid.thermal_time,
            integration_step=self.integration_step,
        )


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(dict(base))
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def config_hash(document: Mapping[str, Any]) -> str:
    payload = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def validate_document(document: Mapping[str, Any]) -> list[str]:
    validator = Draft7Validator(SCHEMA)
    errors: list[str] = []
    for error in sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path)):
        location = ".".join(str(p) for p in error.absolute_path) or "<root>"
        errors.append(f"{location}: {error.message}")
    return errors


def _seeds(value: Union[int, list[int]]) -> tuple[int, ...]:
    if isinstance(value, int):
        return tuple(range(value))
    return tuple(int(v) for v in value)


def build_config(document: Mapping[str, Any]) -> RunConfig:
    """Validate a complete document and freeze it."""
    errors = validate_document(document)
    if errors:
        raise ConfigError(f"{len(errors)} configuration error(s): " + "; ".join(errors), errors)

    cavity = document["cavity"]
    feedback = document["feedback"]
    modulation = document["modulation"]
    readout = document["readout"]
    capacity = document["capacity"]
    tasks = document["tasks"]
    sweep = document["sweep"]

    design = CavityDesign(
        **cavity,
        thermal_time=float(sweep["thermal_time"]),
        feedback_delay=float(feedback["delay"]),
        feedback_phase=float(feedback["phase"]),
        feedback_amplitude_transmission=float(feedback["amplitude_transmission"]),
    )
    lambda_grid = tuple(float(v) for v in readout["lambda_grid"])
    grid = SweepGrid(
        power_points=axis_points(sweep["power_dbm"], "sweep.power_dbm"),
        detuning_points=axis_points(sweep["detuning_ghz"], "sweep.detuning_ghz"),
        carrier_lifetimes=tuple(float(v) for v in sweep["carrier_lifetimes"]),
        thermal_time=float(sweep["thermal_time"]),
        seeds=_seeds(sweep["seeds"]),
        tasks=tuple(sweep["tasks"]),
    )
    step = document["integration"]["step"]
    return RunConfig(
        design=design,
        integration_step=None if step is None else float(step),
        modulation=ModulationConfig(
            symbol_rate=float(modulation["symbol_rate"]),
            node_count=int(modulation["node_count"]),
            detection_window=float(modulation["detection_window"]),
        ),
        mask_seed=int(modulation["mask_seed"]),
        evaluation=EvaluationSettings(
            bias_grid=tuple(float(v) for v in tasks["bias_grid"]),
            lambda_grid=lambda_grid,
            folds=int(readout["folds"]),
            validation_fraction=float(readout["validation_fraction"]),
        ),
        capacity=CapacitySettings(
            orders=tuple(int(v) for v in capacity["orders"]),
            k_max=int(capacity["k_max"]),
            noise_threshold=capacity["noise_threshold"],
            rescale=bool(capacity["rescale"]),
            lambda_grid=lambda_grid,
            folds=int(readout["folds"]),
        ),
        capacity_bias=float(capacity["bias"]),
        task_options={
            name: dict(options)
            for name, options in tasks.items()
            if isinstance(options, Mapping)
        },
        grid=grid,
        region_a_sigma_hz=float(sweep["region_a_sigma_hz"]),
        pulsing=PulsingSettings(**sweep["self_pulsing"]),
        log10_metrics=tuple(document["emit"]["log10_metrics"]),
        document=copy.deepcopy(dict(document)),
    )


def load_document(path: Optional[Union[str, Path]] = None) -> dict[str, Any]:
    """Defaults, with the YAML file at ``path`` merged on top."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    source = Path(path)
    try:
        raw = yaml.safe_load(source.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config file {source}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{source} is not valid YAML: {e}") from e
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{source}: top level must be a mapping")
    return deep_merge(DEFAULTS, raw)


def load_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    config = build_config(load_document(path))
    logger.info(f"Loaded configuration {config.config_hash[:12]} from {path or 'defaults'}")
    return config


def dump_defaults() -> str:
    return yaml.safe_dump(DEFAULTS, sort_keys=False)
