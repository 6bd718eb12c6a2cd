"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its documented codes without a lookup table.
"""


class ManakovError(Exception):
    exit_code = 3


class ConfigError(ManakovError):
    exit_code = 2


class DuplicateModulus(ConfigError):
    pass


class IndexOutOfRange(ManakovError, IndexError):
    pass


class NonFiniteState(ManakovError):
    pass


class BranchDiscontinuity(ManakovError):
    pass


class DegenerateLevel(ManakovError):
    pass


class RepeatedRoot(ManakovError):
    pass


class BranchSelectionFailed(ManakovError):
    pass


class VanishingDelta(ManakovError):
    pass


class InconsistentModulus(ManakovError):
    pass


class FitResidualTooLarge(ManakovError):
    pass


class DiagonalDivisor(ManakovError):
    pass


class RecoveryError(ManakovError):
    exit_code = 4


class NoConvergence(RecoveryError):
    pass


class AmbiguousSolution(RecoveryError):
    pass


class BranchPointCollision(ManakovError):
    pass


class QuadratureFailure(ManakovError):
    pass


class PathNearBranchPoint(ManakovError):
    pass


class CalibrationSpreadTooLarge(ManakovError):
    pass


class ThetaZeroDenominator(ManakovError):
    pass
