import logging
from importlib import import_module
from typing import TYPE_CHECKING, Any, Optional

from ringres.errors import ConfigError
from ringres.tasks.registry import registry

if TYPE_CHECKING:
    from ringres.tasks.base import TaskPlugin

logger = logging.getLogger(__name__)

ENTRY_POINT_GROUP = "ringres.tasks"


def load_entry_points(group: str) -> dict[str, type]:
    from importlib.metadata import entry_points

    plugins: dict[str, type] = {}
    try:
        for ep in entry_points(group=group):
            try:
                module_name, class_name = ep.value.rsplit(":", 1)
                module = import_module(module_name)
                plugins[ep.name] = getattr(module, class_name)
            except Exception as e:
                logger.warning(f"Failed to load entry point {ep.name}: {e}")
    except Exception as e:
        logger.warning(f"Failed to load entry points for group {group}: {e}")
    return plugins


def discover_tasks() -> dict[str, type["TaskPlugin"]]:
    return load_entry_points(ENTRY_POINT_GROUP)


def register_tasks(tasks: dict[str, type["TaskPlugin"]]) -> None:
    for name, task_class in tasks.items():
        registry.register(name, task_class)


def get_task_class(name: str) -> Optional[type["TaskPlugin"]]:
    task_class = registry.get(name)
    if task_class is None:
        from ringres.tasks import register_builtin_tasks

        register_builtin_tasks()
        task_class = registry.get(name)
    return task_class


def instantiate_task(name: str, config: Optional[dict[str, Any]] = None) -> "TaskPlugin":
    task_class = get_task_class(name)
    if task_class is None:
        raise ConfigError(f"Task '{name}' not found")
    instance = task_class()
    instance.initialize(config or {})
    errors = instance.validate()
    if errors:
        raise ConfigError("; ".join(errors), errors)
    return instance


def load_tasks() -> None:
    tasks = discover_tasks()
    register_tasks(tasks)
    logger.info(f"Discovered {len(tasks)} task plugins: {list(tasks.keys())}")
