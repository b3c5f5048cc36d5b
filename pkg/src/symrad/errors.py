"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for invalid input, 3 for numerical guards.
"""


class SymradError(Exception):
    exit_code = 2


class ValidationError(SymradError, ValueError):
    """Input rejected before any numerics ran."""


class NumericalGuard(SymradError, ArithmeticError):
    """A numerical precondition (resolution, conditioning, convergence) failed."""

    exit_code = 3


# symplectic core
class RankDeficient(ValidationError):
    pass


class NotCommuting(ValidationError):
    pass


class NotRotation(ValidationError):
    """The frame's U matrix fails the orthogonal/symplectic check."""


class OddDimension(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotFree(ValidationError):
    pass


# states / wigner
class InvalidState(ValidationError):
    pass


class GridTooCoarse(NumericalGuard):
    pass


class BadCoverage(UserWarning):
    """Grid does not comfortably contain the sampled state (warning only)."""


# metaplectic
class PlanFailure(NumericalGuard):
    pass


# radon
class InterpolationOutOfRange(NumericalGuard):
    pass


class DegenerateDirection(ValidationError):
    pass


class DimensionGuard(ValidationError):
    pass


class DimensionNotOne(ValidationError):
    pass


class TooFewAngles(ValidationError):
    pass


class NyquistViolation(NumericalGuard):
    pass


# gaussian / pauli
class SingularM(NumericalGuard):
    pass


class NotSaturated(ValidationError):
    pass


class MinimumMismatch(NumericalGuard):
    pass


class BracketFailure(NumericalGuard):
    pass


# file formats
class BadMagic(ValidationError):
    pass


class TruncatedFile(ValidationError):
    pass
