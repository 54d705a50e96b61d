"""Exceptions raised by klball and the CLI exit codes they map to."""


class KlballError(Exception):
    """Base class for all klball errors."""

    exit_code = 1


class InputError(KlballError, ValueError):
    """Malformed user input: bad weights, mismatched lengths, unparsable values."""

    exit_code = 2


class DomainError(InputError):
    """Argument outside the domain of an operation (e.g. v not in (0, 2))."""


class CapacityError(KlballError):
    """The exact computation is too large, or no proven upper bound covers the request."""

    exit_code = 3


class ConvergenceError(KlballError, RuntimeError):
    """A root finder or minimizer failed; should not happen for valid input."""
