"""Exception hierarchy.

Every error raised on purpose by the package derives from ``ShiftlabError`` so
that the command line front end can map it onto an exit code.
"""


class ShiftlabError(Exception):
    """Base class for all package errors."""


# operator kernel
class NotAContraction(ShiftlabError):
    pass


class NotStrictContraction(ShiftlabError):
    pass


class NotUnitary(ShiftlabError):
    pass


class NotPositiveSemidefinite(ShiftlabError):
    pass


class DimensionMismatch(ShiftlabError):
    pass


class NegativePowersNeedUnitary(ShiftlabError):
    pass


class PoleInClosedUpperHalfPlane(ShiftlabError):
    pass


class SingularResolvent(ShiftlabError):
    def __init__(self, pole):
        super().__init__(f"resolvent is singular at pole {pole!r}")
        self.pole = pole


class InvalidConfig(ShiftlabError):
    pass


# dilations
class PeriodTooSmall(ShiftlabError):
    pass


# circle step functions
class DeterminantVanishes(ShiftlabError):
    pass


class UnwrapAmbiguous(ShiftlabError):
    pass


class GridTooCoarse(ShiftlabError):
    pass


class NegativeValues(ShiftlabError):
    pass


# contraction pipeline
class BadAlpha(ShiftlabError):
    pass


class HypothesisFailed(ShiftlabError):
    pass


class XNotPositiveContraction(ShiftlabError):
    pass


class NotInUnitInterval(ShiftlabError):
    pass


class KernelNotTrivial(ShiftlabError):
    pass


# dissipative pipeline
class NotDissipative(ShiftlabError):
    pass


class SingularShift(ShiftlabError):
    pass


class Condition31Failed(ShiftlabError):
    pass


class ImproperRational(ShiftlabError):
    pass


class BreakpointAtOne(UserWarning):
    """A circle breakpoint sat on zeta = 1 and was nudged off it."""


# input / command line
class SchemaError(ShiftlabError):
    pass


class InputError(ShiftlabError):
    pass


class ConfigError(ShiftlabError):
    pass
