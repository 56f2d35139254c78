"""Exception hierarchy shared by all modules."""


class SlackBanditError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(SlackBanditError, ValueError):
    pass


class InvalidRouteError(SlackBanditError, ValueError):
    pass


class DuplicateActionError(SlackBanditError, ValueError):
    pass


class ShapeError(SlackBanditError, ValueError):
    pass


class PreconditionError(SlackBanditError, ValueError):
    """An input violates an operation's contract (e.g. off-simplex vector)."""


class NumericalUnderflowError(SlackBanditError, ArithmeticError):
    pass


class DomainError(SlackBanditError, ValueError):
    """Negative entry handed to a routine that requires a non-negative matrix."""


class DegenerateFactorizationError(SlackBanditError, ValueError):
    pass


class ProtocolError(SlackBanditError, ValueError):
    pass


class InvalidHorizonError(SlackBanditError, ValueError):
    pass


class UnsupportedActionSetError(SlackBanditError, ValueError):
    pass


class ConfigurationError(SlackBanditError, ValueError):
    pass


class ParseError(SlackBanditError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyDatasetError(SlackBanditError, ValueError):
    pass
