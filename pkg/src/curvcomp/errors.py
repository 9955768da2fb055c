"""Exception hierarchy shared by every module of the package."""


class GeometryError(Exception):
    """Base class for all errors raised by curvcomp."""


# space-form kernel

class DomainError(GeometryError, ValueError):
    """An argument lies outside the domain of a model-space formula."""


class InvalidTriple(GeometryError, ValueError):
    """Three lengths are not realizable as a triangle in the model surface."""


class OutOfRegime(InvalidTriple):
    """A k>0 configuration is too close to the diameter/perimeter bounds."""


class RangeError(GeometryError, ValueError):
    """An arclength parameter lies outside its admissible interval."""


# metric spaces

class UnknownPoint(GeometryError, KeyError):
    """A point reference does not belong to the queried space."""


class Disconnected(GeometryError):
    """No path joins two points of a graph space."""


class MalformedInput(GeometryError, ValueError):
    """A space description or graph file could not be parsed."""


class NonPositiveWeight(MalformedInput):
    """A graph edge carries a zero, negative or non-numeric weight."""


# comparison

class DegenerateGeodesic(GeometryError, ValueError):
    """An angle was requested along a zero-length geodesic."""


class EmptyBall(GeometryError):
    """A ball contains too few points to form a non-degenerate triangle."""


class NotInterior(GeometryError, ValueError):
    """A point expected strictly inside a geodesic sits at an endpoint."""


# globalization

class GlobalizeError(GeometryError):
    """Base class for outcomes of the split/localize/descent machinery."""


class NoNegativeExcess(GlobalizeError):
    """The excess function has no sample below the tolerance."""


class InconclusiveSplit(GlobalizeError):
    """A negative excess minimum was found but no sub-angle is certifiably bad."""


class AdjacentAngleDefect(GlobalizeError):
    """Adjacent angles at a split point do not sum to pi.

    This is a point where the space fails to be locally of curvature >= k;
    ``point`` holds the split point and ``angle_sum`` the measured sum.
    """

    def __init__(self, message, point=None, excess=None, angle_sum=None, t=None):
        super().__init__(message)
        self.point = point
        self.excess = excess
        self.angle_sum = angle_sum
        self.t = t


class IterationBudgetExceeded(GlobalizeError):
    """localize ran out of iterations before reaching the target scale."""


class ResolutionFloor(GlobalizeError):
    """The construction reached the declared resolution of the space."""


class WitnessNotFound(GlobalizeError):
    """No bad triangle with the base point as apex was found near a point."""


class BudgetExceeded(GlobalizeError):
    """A globalization audit exhausted its step budget."""
