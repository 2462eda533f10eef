"""Exception hierarchy for the toolkit.

Every error carries the CLI exit code it maps to:
1 for invalid input, 2 for numerical failures, 3 for violated assumptions.
"""


class RobinNLSError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 2


class ValidationFailure(RobinNLSError):
    """Malformed or out-of-domain input"""
    exit_code = 1


class NumericalFailure(RobinNLSError):
    """A tolerance could not be met"""
    exit_code = 2


class AssumptionViolation(RobinNLSError):
    """Data falls outside the generic regime the formulas assume"""
    exit_code = 3


# Input validation
class NonDecayingTail(ValidationFailure):
    pass


class MissingReflection(ValidationFailure):
    pass


class DomainError(ValidationFailure):
    pass


class PoleEvaluation(ValidationFailure):
    pass


class StepSizeError(ValidationFailure):
    pass


class ProfileFormatError(ValidationFailure):
    """Malformed profile/config document, with the location of the problem"""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


# Numerical
class StepUnderflow(NumericalFailure):
    pass


class PhaseJump(NumericalFailure):
    pass


class CountMismatch(NumericalFailure):
    pass


class ReflectionTail(NumericalFailure):
    pass


class NonConvergence(NumericalFailure):
    pass


class BoundaryContamination(NumericalFailure):
    pass


# Assumption violations
class DeltaVanishes(AssumptionViolation):
    pass


class RealZero(AssumptionViolation):
    pass


class NotSimple(AssumptionViolation):
    pass


class AZero(AssumptionViolation):
    pass


class SingularSystem(AssumptionViolation):
    pass


class SingularW(AssumptionViolation):
    pass


class SolitonDenominator(AssumptionViolation):
    pass


class RegimeMismatch(AssumptionViolation):
    pass
