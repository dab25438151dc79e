"""Exception taxonomy shared by all modules.

Each class maps to one process exit code so the command-line front end can
translate failures uniformly: check failures exit 1, validation problems
exit 2, runtime/accuracy problems exit 3.
"""
from __future__ import annotations


class RoughHeatError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class DomainError(RoughHeatError, ValueError):
    """An argument lies outside an operation's mathematical domain."""

    exit_code = 2


class InputError(RoughHeatError, ValueError):
    """Structurally invalid input (empty ensemble, mismatched lattices, NaN)."""

    exit_code = 2


class ConfigError(RoughHeatError, ValueError):
    """A run configuration failed validation or a hypothesis gate."""

    exit_code = 2

    def __init__(self, message: str, schema_path: str | None = None):
        super().__init__(message)
        # dotted path into the config document, surfaced on exit code 2
        self.schema_path = schema_path


class AccuracyError(RoughHeatError, ArithmeticError):
    """A quadrature or solver could not reach the requested tolerance."""

    exit_code = 3

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class BlowUpError(RoughHeatError, ArithmeticError):
    """Non-finite values appeared in a trajectory."""

    exit_code = 3

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class ConvergenceError(RoughHeatError, ArithmeticError):
    """An iteration exhausted its budget; carries the distance trace."""

    exit_code = 3

    def __init__(self, message: str, history: list[float] | None = None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class CheckFailure(RoughHeatError):
    """A verification check did not pass (distinct from inability to run)."""

    exit_code = 1
