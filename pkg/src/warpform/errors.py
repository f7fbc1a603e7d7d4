"""Exception hierarchy."""


class WarpformError(Exception):
    """Base class for all package errors."""


class DimensionError(WarpformError, ValueError):
    pass


class OffManifoldError(WarpformError, ValueError):
    pass


class DomainError(WarpformError, ValueError):
    """Point outside chart bounds, or a positivity condition (sigma, rho) fails."""


class DegenerateImmersionError(WarpformError, ValueError):
    pass


class NotALiftError(WarpformError, ValueError):
    pass


class NonNormalError(WarpformError, ValueError):
    pass


class TypeInconsistencyError(WarpformError, ValueError):
    """Data contradicts the assumed point type (e.g. lambda vanishes at a type-B point)."""


class StencilError(WarpformError, ValueError):
    """A finite-difference stencil left the chart or crossed a frame discontinuity."""


class ScenarioError(WarpformError, ValueError):
    pass
