"""
Exception hierarchy for the toolkit.

ValidationError covers bad input (CLI exit code 2), ComputationError covers
numerical or runtime failures on valid input (CLI exit code 1).
"""


class ToolkitError(Exception):
    exit_code = 1


class ValidationError(ToolkitError):
    exit_code = 2


class ComputationError(ToolkitError):
    exit_code = 1


# -- validation --------------------------------------------------------------

class UsageError(ValidationError):
    pass


class NotABijection(ValidationError):
    pass


class EmptyPermutation(ValidationError):
    pass


class ParityViolation(ValidationError):
    pass


class ArchCrossing(ValidationError):
    pass


class BoundExceeded(ValidationError):
    pass


class NotDissipative(ValidationError):
    pass


class InvalidMatching(ValidationError):
    """A pair list that is not a noncrossing perfect matching."""


class SumMismatch(ValidationError):
    pass


class Unsupported(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class TangencyPoint(ValidationError):
    """Angle sits on a near-arc endpoint, where the chord map is undefined."""


# -- computation -------------------------------------------------------------

class MalformedDomain(ComputationError):
    pass


class Escaped(ComputationError):
    def __init__(self, message: str, x: float | None = None):
        super().__init__(message)
        self.x = x


class NonHyperbolicSuspected(ComputationError):
    pass


class TieAtBoundary(ComputationError):
    pass


class StepSizeUnderflow(ComputationError):
    pass


class Nonfinite(ComputationError):
    pass


class MultiValued(ComputationError):
    pass
