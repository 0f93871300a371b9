"""Exception hierarchy shared by every module."""


class ContactCurvError(Exception):
    """Base class for all errors raised by contactcurv."""


class DomainError(ContactCurvError, ValueError):
    """A point lies outside the chart domain of a group model."""


class ChartMismatchError(ContactCurvError, ValueError):
    """A scalar field was built for a different chart than the model."""


class CharacteristicPointError(ContactCurvError):
    """The horizontal gradient vanishes (to tolerance) at the point."""

    def __init__(self, point, l=0.0):
        self.point = tuple(float(c) for c in point)
        self.l = float(l)
        coords = ",".join(f"{c:g}" for c in self.point)
        super().__init__(f"characteristic point at ({coords})")


class OffSurfaceError(ContactCurvError):
    """|u(point)| exceeds the on-surface tolerance."""


class PreconditionError(ContactCurvError, ValueError):
    """An operation's documented precondition does not hold."""


class ParseError(ContactCurvError, ValueError):
    """Syntax error in a surface expression.

    ``offset`` is the byte offset of the offending token and ``expected``
    the set of token kinds that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class EvalDomainError(ContactCurvError, ValueError):
    """A function was evaluated outside its real domain."""

    def __init__(self, message, subexpression):
        self.subexpression = subexpression
        super().__init__(f"{message} in '{subexpression}'")


class ValidityError(ContactCurvError, ValueError):
    """A classification branch's validity inequality fails on the grid."""

    def __init__(self, inequality, where=None):
        self.inequality = inequality
        self.where = where
        loc = f" at s={where:.17g}" if where is not None else ""
        super().__init__(f"validity inequality violated: {inequality}{loc}")


class ConvergenceError(ContactCurvError):
    """An iterative solver failed to converge."""


class DegeneratePointError(ContactCurvError):
    """A parametric patch point where the implicit construction breaks down."""
