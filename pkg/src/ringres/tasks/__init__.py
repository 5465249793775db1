from typing import Literal

from ringres.settings import load_core_settings
from ringres.tasks.base import (
    Parameter,
    Segment,
    Split,
    TaskDataset,
    TaskMetadata,
    TaskPlugin,
)
from ringres.tasks.loader import (
    discover_tasks,
    get_task_class,
    instantiate_task,
    load_entry_points,
    load_tasks,
)
from ringres.tasks.registry import registry

TaskName = Literal["narma10", "classify", "equalize", "radar"]

BUILTIN_TASKS: tuple[str, ...] = ("narma10", "classify", "equalize", "radar")

if load_core_settings().auto_discover:
    load_tasks()


def register_builtin_tasks() -> None:
    from ringres.tasks.channel import ChannelEqualizationTask
    from ringres.tasks.narma import Narma10Task
    from ringres.tasks.radar import RadarTask
    from ringres.tasks.waveform import WaveformClassificationTask

    registry.register("narma10", Narma10Task)
    registry.register("classify", WaveformClassificationTask)
    registry.register("equalize", ChannelEqualizationTask)
    registry.register("radar", RadarTask)


__all__ = [
    "BUILTIN_TASKS",
    "Parameter",
    "Segment",
    "Split",
    "TaskDataset",
    "TaskMetadata",
    "TaskName",
    "TaskPlugin",
    "discover_tasks",
    "get_task_class",
    "instantiate_task",
    "load_entry_points",
    "load_tasks",
    "register_builtin_tasks",
    "registry",
]
