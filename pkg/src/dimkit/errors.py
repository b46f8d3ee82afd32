"""Exception hierarchy.

Every error raised by the library derives from :class:`DimkitError`. The
string form of an error starts with its class name so command-line users can
grep for it (``TooManyDims: ...``).
"""


class DimkitError(Exception):
    """Base class for all library errors."""

    def __str__(self):
        msg = super().__str__()
        return f"{type(self).__name__}: {msg}" if msg else type(self).__name__


# data validation
class NonFinite(DimkitError, ValueError):
    pass


class TooFewRows(DimkitError, ValueError):
    pass


class EmptyColumns(DimkitError, ValueError):
    pass


class DimensionMismatch(DimkitError, ValueError):
    pass


class InvalidParameter(DimkitError, ValueError):
    pass


# preprocessing
class ZeroVariance(DimkitError, ValueError):
    pass


class RankDeficient(DimkitError, ValueError):
    pass


# graphs
class KTooLarge(DimkitError, ValueError):
    pass


class NonPositiveRadius(DimkitError, ValueError):
    pass


class NegativeWeight(DimkitError, ValueError):
    pass


class DisconnectedGraph(DimkitError, RuntimeError):
    pass


# kernels
class NegativeEntries(DimkitError, ValueError):
    pass


class ZeroVector(DimkitError, ValueError):
    pass


# generators
class UnknownModel(DimkitError, ValueError):
    pass


class BadSampleCount(DimkitError, ValueError):
    pass


# reducers
class DimensionTooLarge(DimkitError, ValueError):
    pass


class InsufficientPositiveEigenvalues(DimkitError, RuntimeError):
    pass


class TooManyDims(DimkitError, ValueError):
    pass


class SingularWithinScatter(DimkitError, RuntimeError):
    pass


class SingularLocalGram(DimkitError, RuntimeError):
    pass


class DegenerateVariance(DimkitError, RuntimeError):
    pass


class ZeroWeightedVariance(DimkitError, ValueError):
    pass


# estimators
class TooFewPoints(DimkitError, ValueError):
    pass


class DuplicatePoints(DimkitError, ValueError):
    pass


class DegenerateDistances(DimkitError, ValueError):
    pass


class ZeroTotalVariance(DimkitError, ValueError):
    pass


class AllRatiosOne(DimkitError, ValueError):
    pass


# benchmark
class OutOfMemoryGuard(DimkitError, MemoryError):
    pass
