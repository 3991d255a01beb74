"""Exception types shared across the package."""


class GraphHodgeError(Exception):
    """Base class for all package errors."""


# graph construction
class DuplicateIdError(GraphHodgeError):
    pass


class DanglingEndpointError(GraphHodgeError):
    pass


# exact cochain backend
class GradeMissingError(GraphHodgeError):
    pass


class DegreeOutOfRangeError(GraphHodgeError):
    pass


# cross sections
class BadResolutionError(GraphHodgeError):
    pass


class EmptySpectrumError(GraphHodgeError):
    pass


class InsufficientModesError(GraphHodgeError):
    pass


# complex builder
class ResolutionMismatchError(GraphHodgeError):
    pass


class BadTopologyError(GraphHodgeError):
    pass


class GluingMismatchError(GraphHodgeError):
    pass


class OpenBoundaryLeftError(GraphHodgeError):
    pass


class SOutOfRangeError(GraphHodgeError):
    pass


# spectral engine
class NoConvergenceError(GraphHodgeError):
    pass


class AmbiguousKernelError(GraphHodgeError):
    pass


class UnresolvedSpectrumError(GraphHodgeError):
    pass


class AmbientMismatchError(GraphHodgeError):
    pass


# cylinder modes
class EdgeNotCylindricalError(GraphHodgeError):
    pass


class MuTooLargeError(GraphHodgeError):
    pass


class IllConditionedFitError(GraphHodgeError):
    pass


class ResidualTooLargeError(GraphHodgeError):
    pass


class CylinderTooShortError(GraphHodgeError):
    pass


class RankDeficientInputError(GraphHodgeError):
    pass


# splicing lab
class ROutOfRangeError(GraphHodgeError):
    pass


class TruncationTooShortError(GraphHodgeError):
    pass


# scene ingestion
class ParseError(GraphHodgeError):
    pass


class ValidationError(GraphHodgeError):
    pass
