"""Exception hierarchy shared by all modules."""


class TypeIVError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(TypeIVError, ValueError):
    pass


class ParameterOutOfRange(TypeIVError, ValueError):
    pass


class DomainMismatch(TypeIVError, ValueError):
    pass


# linalg
class NotSymmetric(TypeIVError, ValueError):
    pass


class NoConvergence(TypeIVError, RuntimeError):
    pass


class NotOrthonormal(TypeIVError, ValueError):
    pass


class NotUnitary(TypeIVError, ValueError):
    pass


# evaluation
class EvaluationError(TypeIVError, ArithmeticError):
    """A map could not be evaluated at the requested point."""


class Pole(EvaluationError):
    pass


class BranchPoint(EvaluationError):
    pass


class NotDifferentiable(EvaluationError):
    pass


# domains, metrics, groups
class NotInterior(TypeIVError, ValueError):
    pass


class TargetNotInterior(NotInterior):
    pass


class InvalidElement(TypeIVError, ValueError):
    pass


# hforms
class NotPolynomial(TypeIVError, ValueError):
    pass


class NormMismatch(TypeIVError, ValueError):
    pass


class NoSolution(TypeIVError, ValueError):
    pass


# classify
class NotNormalized(TypeIVError, ValueError):
    pass


class NotIsometry(TypeIVError, ValueError):
    pass


class RecoveryFailed(TypeIVError, RuntimeError):
    pass


class StructureViolation(TypeIVError, ValueError):
    pass


# jets
class NotAnalyticAtOrigin(TypeIVError, ValueError):
    pass


class InexactCoefficient(TypeIVError, ValueError):
    """An exact computation met a constant with no exact representation."""


class NotNormalForm(TypeIVError, ValueError):
    def __init__(self, message, jet=None):
        super().__init__(message)
        self.jet = jet
