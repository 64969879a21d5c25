"""Exception types shared by all modules."""


class BlendSplineError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(BlendSplineError, ValueError):
    """Malformed arguments: wrong shapes, non-monotone grids, bad parameters."""


class DomainError(BlendSplineError, ValueError):
    """Evaluation parameter outside the curve's domain."""


class WellPosednessError(BlendSplineError, ValueError):
    """A logarithm was requested at or too close to the cut locus.

    ``pair`` holds whatever identifies the offending points (coordinates at
    the manifold level, data/anchor indices at the fitting level).
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair
