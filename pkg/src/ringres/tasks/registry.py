from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from ringres.tasks.base import TaskPlugin


class TaskRegistry:
    def __init__(self) -> None:
        self._tasks: dict[str, type["TaskPlugin"]] = {}

    def register(self, name: str, task_class: type["TaskPlugin"]) -> None:
        self._tasks[name] = task_class

    def get(self, name: str) -> Optional[type["TaskPlugin"]]:
        return self._tasks.get(name)

    def list_all(self) -> list[str]:
        return sorted(self._tasks)

    def __contains__(self, name: str) -> bool:
        return name in self._tasks


registry = TaskRegistry()
