from dataclasses import dataclass
import os
from typing import Optional


@dataclass(frozen=True)
class CoreSettings:
    log_level: str
    workers: int
    telemetry_endpoint: Optional[str]
    service_name: str
    auto_discover: bool


VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def load_core_settings() -> CoreSettings:
    return CoreSettings(
        log_level=os.getenv("RINGRES_LOG_LEVEL", "INFO").upper(),
        workers=int(os.getenv("RINGRES_WORKERS", "1")),
        telemetry_endpoint=os.getenv("TELEMETRY_ENDPOINT", None),
        service_name=os.getenv("RINGRES_SERVICE_NAME", "ringres"),
        auto_discover=os.getenv("RINGRES_AUTO_DISCOVER", "").lower() == "true",
    )


def validate(settings: CoreSettings) -> list[str]:
    errors: list[str] = []
    if settings.log_level not in VALID_LOG_LEVELS:
        errors.append(
            f"Invalid RINGRES_LOG_LEVEL '{settings.log_level}'. "
            f"Valid levels: {VALID_LOG_LEVELS}"
        )
    if settings.workers < 1:
        errors.append(f"RINGRES_WORKERS must be >= 1, got {settings.workers}")
    return errors
