"""Exception types raised by the holodyn modules."""


class HolodynError(Exception):
    """Base class for all package errors."""


# -- geometry --------------------------------------------------------------

class PointNotOnBoundary(HolodynError):
    pass


class DegenerateGradient(HolodynError):
    pass


class NotComplexTangent(HolodynError):
    pass


# -- basin dynamics --------------------------------------------------------

class DomainError(HolodynError):
    pass


# -- conformal radius ------------------------------------------------------

class OriginOutside(HolodynError):
    pass


class Truncated(HolodynError):
    pass


class NoConvergence(HolodynError):
    pass


# -- CR metric -------------------------------------------------------------

class ProjectionFailure(HolodynError):
    pass


class InsufficientData(HolodynError):
    pass


class Inapplicable(HolodynError):
    pass


class SamplingTooCoarse(HolodynError):
    pass


# -- Kobayashi -------------------------------------------------------------

class OutsideDomain(HolodynError):
    pass


class InclusionViolated(HolodynError):
    pass


# -- boundary rates --------------------------------------------------------

class QuadratureUnderflow(HolodynError):
    pass


class MapsOffBoundary(HolodynError):
    pass


# -- fibration / entropy ---------------------------------------------------

class ZeroPoint(HolodynError):
    pass


class FibersCoincide(HolodynError):
    pass


class ProjectionPoleOnCircle(HolodynError):
    pass


class PhaseJumpTooLarge(HolodynError):
    pass


class MinZeros(HolodynError):
    pass


class BudgetExceeded(HolodynError):
    pass
