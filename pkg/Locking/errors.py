"""
Locking Errors Module
Exception hierarchy shared by the locking library, providers and CLI.
"""


class LockingError(Exception):
    """Base class for every error raised by the locking library."""


class DomainError(LockingError):
    """A value violates an operation's precondition (e.g. element not in set)."""


class CapacityError(LockingError):
    """An exhaustive sweep was requested beyond its width cap."""

    def __init__(self, what: str, width: int, cap: int):
        super().__init__(f"{what} is limited to width {cap}, got {width}")
        self.width = width
        self.cap = cap


class ConstructionError(LockingError):
    """A builder produced a block that fails its own validation."""


class NetlistError(LockingError):
    """Structural netlist problem: cycle, undriven wire, unknown output."""


class BenchParseError(LockingError):
    """Bench text could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ConfigError(LockingError):
    """Experiment configuration or CLI parameters are invalid."""


class SolverError(LockingError):
    """External solver failed or produced an unparsable answer."""
