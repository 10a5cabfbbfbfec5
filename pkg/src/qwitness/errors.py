"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`QWitnessError`,
which is a ``ValueError`` so callers that only care about bad input can catch that.
"""


class QWitnessError(ValueError):
    pass


class InvariantViolation(QWitnessError):
    """Input data breaks a physical or probabilistic invariant."""


class BlochOutOfBall(InvariantViolation):
    pass


class NotPositive(InvariantViolation):
    pass


class InvalidPovm(InvariantViolation):
    pass


class InvalidTable(InvariantViolation):
    pass


class ZeroConditioningProbability(InvariantViolation):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DomainError(QWitnessError):
    pass


class UnsupportedN(QWitnessError):
    pass


class DegenerateMarginal(QWitnessError):
    pass


class DegenerateDenominator(QWitnessError):
    pass


class ConfigError(QWitnessError):
    pass


class ParseError(QWitnessError):
    pass
