"""Exception types shared across the package."""


class AmtrajError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AmtrajError, ValueError):
    """A problem description violates the legality conditions.

    Attributes:
        violations: one human-readable message per violated condition.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ProblemFileError(AmtrajError, ValueError):
    """A problem file failed to parse.

    Attributes:
        errors: one message per offending field, with its location.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class NoFreeVariablesError(AmtrajError, ValueError):
    """An operation needs free boundary derivatives but the problem fixes all of them."""


class SingularFreeBlockError(AmtrajError, RuntimeError):
    """The free-variable block of the assembled cost matrix is numerically singular.

    This signals an ill-posed problem (for example, weights that leave a free
    derivative order completely unpenalized), not a transient numerical issue.
    """


class DegenerateSegmentError(AmtrajError, RuntimeError):
    """A segment's duration cost has no positive stationary point.

    Happens when the boundary conditions of a segment carry no motion, so the
    cost is monotone in the duration and the optimum collapses to zero length.

    Attributes:
        segment: index of the offending segment, when known.
    """

    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


class ConditioningError(AmtrajError, RuntimeError):
    """A numerical routine lost too much precision to trust its result."""
