"""Exception types raised across the package."""


class MpccError(ValueError):
    """Base class for all package errors."""


class DomainError(MpccError):
    """An argument lies outside the domain of an operation."""


class RegimeError(MpccError):
    """The requested closed-form regime does not apply to the instance."""


class InfeasibleError(MpccError):
    """The instance admits no valid allocation."""


class ParseError(MpccError):
    """Malformed input file. ``line`` is 1-based, or None for whole-file errors."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)
