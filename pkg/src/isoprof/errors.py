"""Exception hierarchy shared by all isoprof modules."""


class IsoprofError(Exception):
    """Base class for all library errors."""


class DimensionError(IsoprofError, ValueError):
    """A point or vector does not match the ambient dimension of a body."""


class BodySpecError(IsoprofError, ValueError):
    """Malformed body description.

    ``path`` is the JSON-pointer style location of the offending field.
    """

    def __init__(self, path, message):
        self.path = path or "/"
        super().__init__(f"{self.path}: {message}")


class ProjectionError(IsoprofError, ArithmeticError):
    """An iterative projection did not converge within its iteration cap."""


class NoClosedFormError(IsoprofError, NotImplementedError):
    """A structural operation has no closed form for this family/point."""


class NotBoundaryError(IsoprofError, ValueError):
    """A point passed as a boundary point is not on the boundary."""


class BoundedBodyError(IsoprofError, ValueError):
    """An operation that needs an unbounded body received a bounded one."""


class UnboundedBodyError(IsoprofError, ValueError):
    """An operation that needs a bounded body received an unbounded one."""


class DegenerateError(IsoprofError, ValueError):
    """The body has a degenerate asymptotic object where a solid one is needed."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class RangeError(IsoprofError, ValueError):
    """A requested value lies outside the certified range of a table."""


class BracketError(IsoprofError, AssertionError):
    """The lower column of a profile bracket exceeds the upper column."""


class NotAConeError(IsoprofError, ValueError):
    """A cone-only operation received a body that is not a cone."""


class EmptyWindowError(IsoprofError, ValueError):
    """A body does not meet the requested window."""
