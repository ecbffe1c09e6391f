"""Exception and warning types raised by :mod:`opmod`."""


class OpmodError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(OpmodError, ValueError):
    """A matrix or function argument violates its structural contract."""


class InvalidParameterError(OpmodError, ValueError):
    """A scalar parameter (norm index, grid point, order, ...) is out of range."""


class CoincidentNodeError(OpmodError, ValueError):
    """A divided difference hit equal nodes and no derivative is available."""


class AliasingError(OpmodError):
    """The sampling grid does not resolve the requested frequency band."""


class ResolutionError(OpmodError, ValueError):
    """A discretised construction was asked for with too few grid points."""


class InstanceOverflowError(OpmodError, OverflowError):
    """A construction would leave the double-precision range."""


class SchemaError(OpmodError, ValueError):
    """A serialized document has the wrong schema or version."""


class ConfigError(OpmodError, ValueError):
    """A suite configuration is malformed; carries field and line context."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line


class BranchAmbiguityWarning(UserWarning):
    """An eigenvalue sits on the branch cut of the principal argument."""
