"""Exception hierarchy; the CLI maps these onto exit codes."""


class FeyntopeError(Exception):
    """Base class for all errors raised by the package."""


class GraphValidationError(FeyntopeError, ValueError):
    """Malformed graph document or a violated graph invariant."""


class MissingKinematicsError(GraphValidationError):
    pass


class EnumerationCapError(FeyntopeError):
    """Exhaustive enumeration refused because the graph has too many edges."""


class LatticeError(FeyntopeError, ValueError):
    """Inconsistent lattice data (degree mismatch, duplicates, bad reduction)."""


class DegenerateConfigurationError(FeyntopeError):
    """Point configuration does not span the expected dimension."""


class ResonanceError(FeyntopeError):
    """Contiguity reduction hit an identically vanishing facet pairing."""

    def __init__(self, message, facet=None, alpha=None):
        super().__init__(message)
        self.facet = facet
        self.alpha = alpha


class ReductionLimitError(FeyntopeError):
    pass


class GammaSeriesError(FeyntopeError):
    pass


class NotInteriorError(FeyntopeError, ValueError):
    """Integral requested at a point outside the open convergence cone."""


class DivergentInputError(FeyntopeError, ValueError):
    pass


class QuadratureToleranceError(FeyntopeError):
    """Requested tolerance not reached within the evaluation budget."""
