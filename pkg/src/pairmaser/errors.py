"""Exception hierarchy shared across the package."""


class PairmaserError(Exception):
    """Base class for all package errors."""


class DomainError(PairmaserError, ValueError):
    """A parameter or state lies outside its admissible domain."""


class TruncationError(PairmaserError):
    """The truncated Fock space cannot hold the state without losing mass."""


class DivergenceError(PairmaserError):
    """No steady state exists for the requested reservoir."""


class UndefinedTemperatureError(PairmaserError):
    """A temperature was requested where its defining log argument is invalid."""


class IntegrationError(PairmaserError):
    """Step-size or horizon limits of the master-equation integrator violated."""


class ConfigError(PairmaserError):
    """A scenario configuration could not be parsed or validated."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
