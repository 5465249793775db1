"""
Append-only checkpoint of finished grid points.

One JSON object per line; the first line records the configuration hash so a
resume never mixes results of different configurations. A line cut short by
a kill is ignored on load.
"""

import json
import logging
import os
import uuid
from pathlib import Path
from threading import Lock

from ringres.errors import ConfigError
from ringres.sweep.results import SweepResult

logger = logging.getLogger(__name__)


class CheckpointStore:
    def __init__(self, file_path: Path, config_hash: str, resume: bool = True) -> None:
        self._file_path = file_path
        self._config_hash = config_hash
        self._lock = Lock()
        if resume and file_path.exists():
            self._results = self._load()
        else:
            self._results = {}
            self._start()

    @property
    def path(self) -> Path:
        return self._file_path

    def completed(self) -> dict[str, SweepResult]:
        with self._lock:
            return dict(self._results)

    def __contains__(self, key: str) -> bool:
        with self._lock:
            return key in self._results

    def __len__(self) -> int:
        with self._lock:
            return len(self._results)

    def append(self, result: SweepResult) -> None:
        with self._lock:
            line = json.dumps(result.to_record(), sort_keys=True)
            with self._file_path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            self._results[result.point.key] = result

    def _start(self) -> None:
        self._file_path.parent.mkdir(parents=True, exist_ok=True)
        header = json.dumps({"config_hash": self._config_hash})
        self._atomic_write(header + "\n")

    def _load(self) -> dict[str, SweepResult]:
        lines = self._file_path.read_text(encoding="utf-8").splitlines()
        if not lines:
            self._start()
            return {}
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError:
            raise ConfigError(f"{self._file_path} is not a ringres checkpoint")
        if header.get("config_hash") != self._config_hash:
            raise ConfigError(
                f"{self._file_path} was written for configuration "
                f"{str(header.get('config_hash'))[:12]}, current is {self._config_hash[:12]}; "
                "start without --resume or use another output directory"
            )

        results: dict[str, SweepResult] = {}
        valid = [lines[0]]
        for number, line in enumerate(lines[1:], start=2):
            try:
                result = SweepResult.from_record(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                logger.warning(f"Ignoring unreadable checkpoint line {number}")
                continue
            results[result.point.key] = result
            valid.append(line)
        if len(valid) != len(lines):
            # rewrite so later appends do not follow a torn line
            self._atomic_write("\n".join(valid) + "\n")
        logger.info(f"Resuming from {self._file_path}: {len(results)} grid points done")
        return results

    def _atomic_write(self, payload: str) -> None:
        temp_path = self._file_path.with_suffix(
            f"{self._file_path.suffix}.{uuid.uuid4().hex}.tmp"
        )
        try:
            temp_path.write_text(payload, encoding="utf-8")
            temp_path.replace(self._file_path)
        except Exception:
            if temp_path.exists():
                temp_path.unlink()
            raise
