"""Dimension witnesses, randomness bounds and bounded hidden-variable certification
for two-input/two-output prepare-and-measure and bipartite qubit scenarios."""

from .errors import (ConfigError, DegenerateDenominator, DegenerateMarginal, DomainError,
                     InvariantViolation, ParseError, QWitnessError, UnsupportedN,
                     ZeroConditioningProbability)

__version__ = "0.1.0"
