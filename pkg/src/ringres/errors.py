"""
Exception hierarchy shared by the simulator, the readout and the sweep engine.

Every error raised on purpose by ringres derives from RingresError so callers
(the sweep workers in particular) can tell model failures apart from bugs.
"""

from typing import Optional, Sequence


class RingresError(Exception):
    """Base class for all ringres errors."""


class ConfigError(RingresError, ValueError):
    """
    Invalid configuration or physical parameters.

    Attributes:
        messages: Every individual violation found, in document order
    """

    messages: list[str]

    def __init__(self, message: str, messages: Optional[Sequence[str]] = None) -> None:
        super().__init__(message)
        self.messages = list(messages) if messages else [message]


class PreconditionError(RingresError, ValueError):
    """
    An operation was called with inputs outside its domain.

    Attributes:
        index: Offending sample index, when the violation is localised
    """

    index: Optional[int]

    def __init__(self, message: str, index: Optional[int] = None) -> None:
        super().__init__(message)
        self.index = index


class IntegrationError(RingresError):
    """
    The cavity state stopped being finite.

    Attributes:
        time: Simulation time in seconds at which the state diverged
        term: Name of the diverging state component
    """

    time: float
    term: str

    def __init__(self, time: float, term: str) -> None:
        super().__init__(f"Integration failed at t={time:.6e} s: {term} is not finite")
        self.time = time
        self.term = term


class ReadoutError(RingresError):
    """Readout training or evaluation failed."""


class SingularSystemError(ReadoutError):
    """The unregularised normal equations are singular."""


class DataIngestionError(RingresError):
    """
    A dataset file could not be read.

    Attributes:
        path: File being read
        line: 1-based line number of the problem, if known
    """

    path: str
    line: Optional[int]

    def __init__(self, message: str, path: str, line: Optional[int] = None) -> None:
        location = f"{path}:{line}" if line is not None else path
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line = line
