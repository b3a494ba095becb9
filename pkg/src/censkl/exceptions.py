"""Exception hierarchy shared by every censkl module."""


class CensKLError(ValueError):
    """Base class for all errors raised by censkl."""


class ParameterError(CensKLError):
    """Invalid distribution or study parameters."""


class TieError(CensKLError):
    """Tied or non-increasing order statistics produced a zero spacing."""


class DomainError(CensKLError):
    """Data outside the domain an operation requires (e.g. nonpositive values)."""


class DegenerateSpacingError(CensKLError):
    """A harmonic-mean spacing collapsed to zero because of boundary windows."""


class TableMissError(CensKLError, KeyError):
    """No critical value or window rule covers the requested cell."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class TableParseError(CensKLError):
    """A critical-value CSV could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
