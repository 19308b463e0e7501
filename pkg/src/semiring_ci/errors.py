"""Exception hierarchy shared by all modules."""


class SemiringCIError(Exception):
    """Base class for every error raised by this package."""


class CarrierError(SemiringCIError, TypeError):
    """A value does not belong to the carrier of the semiring it is used with."""


class CapabilityError(SemiringCIError):
    """The semiring lacks a property (flag) that the operation needs."""


class SchemaError(SemiringCIError, ValueError):
    """Variables are missing from a schema, duplicated, or otherwise inconsistent."""


class EmptySupportError(SemiringCIError, ValueError):
    """An operation would produce a K-relation with empty support."""


class DegenerateScaleError(SemiringCIError, ValueError):
    """Scaling by the zero element."""


class PreconditionError(SemiringCIError, ValueError):
    """Input violates a documented precondition."""


class IntegrityError(SemiringCIError):
    """A replayed computation diverged from its recorded trace."""


class ParseError(SemiringCIError, ValueError):
    """Malformed literal, file, or JSON document."""
