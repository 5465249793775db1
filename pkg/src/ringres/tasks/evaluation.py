import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ringres.cavity.params import PhysicalParams
from ringres.cavity.state import DetuningTrace
from ringres.errors import PreconditionError
from ringres.readout.metrics import MetricKind, is_better, score, waveform_accuracy
from ringres.readout.ridge import DEFAULT_FOLDS, DEFAULT_LAMBDA_GRID, fit_readout, predict
from ringres.reservoir.mask import Mask
from ringres.reservoir.modulation import ModulationConfig
from ringres.reservoir.runner import ReservoirRun, TimeDelayReservoir
from ringres.tasks.base import TaskDataset
from ringres.telemetry import get_tracer

logger = logging.getLogger(__name__)
tracer = get_tracer()

DEFAULT_BIAS_GRID: tuple[float, ...] = tuple(round(0.1 * i, 1) for i in range(1, 11))
# added to every bias candidate when the mask is signed, keeping levels >= 0
SIGNED_MASK_BIAS_OFFSET = 1.0


@dataclass(frozen=True)
class EvaluationSettings:
    bias_grid: tuple[float, ...] = DEFAULT_BIAS_GRID
    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    folds: int = DEFAULT_FOLDS
    validation_fraction: float = 0.2


@dataclass(frozen=True)
class TaskScore:
    task: str
    metric: MetricKind
    value: float
    bias: float
    ridge_lambda: float
    subset_values: tuple[float, ...]
    detuning: DetuningTrace = field(repr=False)
    extras: dict[str, float] = field(default_factory=dict)


def _validation_score(
    run: ReservoirRun,
    targets: np.ndarray,
    kind: MetricKind,
    settings: EvaluationSettings,
) -> float:
    rows = run.states.shape[0]
    cut = int(round(rows * (1.0 - settings.validation_fraction)))
    if cut < max(settings.folds, 2) or cut >= rows:
        raise PreconditionError(
            f"training segment of {rows} rows is too short for a "
            f"{settings.validation_fraction:.0%} validation split"
        )
    model = fit_readout(run.states[:cut], targets[:cut], settings.lambda_grid, settings.folds)
    return score(kind, predict(model, run.states[cut:]), targets[cut:])


def select_bias(
    dataset: TaskDataset,
    params: PhysicalParams,
    modulation: ModulationConfig,
    mask: Mask,
    settings: EvaluationSettings,
) -> tuple[float, ReservoirRun]:
    """Bias whose training run scores best on the held-back tail of the training rows."""
    offset = SIGNED_MASK_BIAS_OFFSET if mask.signed else 0.0
    train = dataset.train_segment()
    best: Optional[tuple[float, float, ReservoirRun]] = None
    for bias in settings.bias_grid:
        reservoir = TimeDelayReservoir(params, modulation.with_bias(bias + offset), mask)
        run = reservoir.run(train.inputs, train.warmup)
        if len(settings.bias_grid) == 1:
            return bias + offset, run
        value = _validation_score(run, train.kept_targets, dataset.metric_kind, settings)
        logger.debug(f"{dataset.name}: bias {bias + offset:.2f} -> {dataset.metric_kind} {value:.4g}")
        if best is None or is_better(dataset.metric_kind, value, best[1]):
            best = (bias + offset, value, run)
    if best is None:
        raise PreconditionError("bias grid is empty")
    return best[0], best[2]


def evaluate_task(
    dataset: TaskDataset,
    params: PhysicalParams,
    modulation: ModulationConfig,
    mask_seed: int,
    settings: Optional[EvaluationSettings] = None,
) -> TaskScore:
    """Select bias and lambda on the training segment, then score every test subset."""
    settings = settings or EvaluationSettings()
    test_segments = dataset.test_segments()
    if not test_segments:
        raise PreconditionError(f"{dataset.name}: dataset has no test split")

    with tracer.start_as_current_span("evaluate_task") as span:
        span.set_attribute("task", dataset.name)
        mask = Mask.generate(modulation.node_count, mask_seed, dataset.mask_range)
        bias, train_run = select_bias(dataset, params, modulation, mask, settings)
        train = dataset.train_segment()
        model = fit_readout(
            train_run.states, train.kept_targets, settings.lambda_grid, settings.folds
        )

        reservoir = TimeDelayReservoir(params, modulation.with_bias(bias), mask)
        traces = [train_run.detuning]
        values: list[float] = []
        votes: list[float] = []
        for segment in test_segments:
            run = reservoir.run(segment.inputs, segment.warmup, scale=train_run.scale)
            traces.append(run.detuning)
            predicted = predict(model, run.states)
            values.append(score(dataset.metric_kind, predicted, segment.kept_targets))
            groups = segment.kept_groups
            if dataset.metric_kind == "accuracy" and groups is not None:
                votes.append(waveform_accuracy(predicted, segment.kept_targets, groups))

        value = float(np.mean(values))
        extras = {"waveform_accuracy": float(np.mean(votes))} if votes else {}
        span.set_attribute("bias", bias)
        span.set_attribute("ridge_lambda", model.ridge_lambda)
        span.set_attribute(dataset.metric_kind, value)

    logger.debug(
        f"{dataset.name}: bias={bias:.2f} lambda={model.ridge_lambda:.1e} "
        f"{dataset.metric_kind}={value:.4g}"
    )
    return TaskScore(
        task=dataset.name,
        metric=dataset.metric_kind,
        value=value,
        bias=bias,
        ridge_lambda=model.ridge_lambda,
        subset_values=tuple(values),
        detuning=DetuningTrace.concatenate(traces),
        extras=extras,
    )
