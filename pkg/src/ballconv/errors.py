"""Exception hierarchy shared by every module."""


class BallConvError(Exception):
    """Base class for all library errors."""


class ParameterError(BallConvError, ValueError):
    """Invalid input parameters (bad exponent, dimension, body data)."""


class PreconditionError(BallConvError, ValueError):
    """A stated precondition of an operation does not hold."""


class NotBallConvexError(PreconditionError):
    """Some principal curvature is strictly below 1/R."""

    def __init__(self, message, min_slack=None):
        super().__init__(message)
        self.min_slack = min_slack


class GeometryError(BallConvError):
    """Geometric configuration outside what the computation supports."""


class CornerError(GeometryError):
    """The requested normal lies in the normal cone of a corner."""

    def __init__(self, message, corner):
        super().__init__(message)
        self.corner = corner


class EvaluationError(BallConvError, ArithmeticError):
    """A non-finite or otherwise invalid value appeared during evaluation."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DegenerateBodyError(EvaluationError):
    """A normalising quantity vanished (e.g. an R-ball polyhedron)."""


class WeightError(BallConvError, ValueError):
    """A weight function dropped below its declared lower bound."""


class StarvationError(BallConvError):
    """The requested cut mass cannot be removed in some directions."""

    def __init__(self, message, directions=()):
        super().__init__(message)
        self.directions = tuple(directions)
