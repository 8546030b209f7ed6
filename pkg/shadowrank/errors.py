"""Exception types raised by shadowrank."""


class ShadowRankError(Exception):
    """Base class for all shadowrank errors."""


class ParameterError(ShadowRankError, ValueError):
    """Invalid geometry, sampling or numeric parameter."""


class OverlapError(ParameterError):
    """Source and observer domains intersect or nearly touch."""


class DimensionError(ShadowRankError, ValueError):
    """Operation called on a scene of the wrong dimensionality."""


class DivergenceError(ShadowRankError, RuntimeError):
    """Quadrature refinement did not converge."""


class SingularityError(ShadowRankError, ValueError):
    """Kernel evaluated at coincident points."""


class BlockSizeError(ShadowRankError, ValueError):
    """Dense block would exceed the configured entry cap."""


class ShapeError(ShadowRankError, ValueError):
    """Vector length does not match the block."""


class ConvergenceError(ShadowRankError, RuntimeError):
    """SVD failed or the randomized range finder hit its rank cap."""


class FloorError(ShadowRankError, ValueError):
    """Threshold lies below what the spectrum can certify."""


class DegenerateKneeError(ShadowRankError, ValueError):
    """Singular-value curve has no identifiable knee."""


class MissingVectorsError(ShadowRankError, ValueError):
    """Spectrum lacks the singular vectors an analysis needs."""


class EmptyBandError(ShadowRankError, ValueError):
    """Edge band or its complement contains no points."""


class NonUniformSamplingError(ShadowRankError, ValueError):
    """DFT analysis needs a uniformly sampled line."""


class GeometryError(ShadowRankError, ValueError):
    """Scene does not have the geometry an operation requires."""


class UnsupportedShapeError(ShadowRankError, ValueError):
    """Domain is not a flat convex polygon."""


class ConfigError(ShadowRankError, ValueError):
    """Configuration file could not be parsed or validated."""


class SummaryError(ShadowRankError, ValueError):
    """Run summary does not match the published schema."""
