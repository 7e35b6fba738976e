"""Exception types raised by the numerical routines."""


class NonlocError(Exception):
    """Base class for all package errors."""


class DomainError(NonlocError, ValueError):
    """Argument outside the domain where a formula is defined."""


class PoleError(DomainError):
    """Gamma function evaluated at a non-positive integer."""


class NonConvergenceError(NonlocError, RuntimeError):
    """A quadrature or refinement loop failed to reach its tolerance."""


class DivergenceError(NonlocError, ArithmeticError):
    """An integral grows without bound under refinement."""


class TabulationError(NonlocError, RuntimeError):
    """A tabulated kernel failed its internal consistency checks."""


class NormalizationError(NonlocError, ValueError):
    """A kernel normalizer or mass check failed."""


class BVRequestError(NonlocError, ValueError):
    """A p > 1 Sobolev quantity was requested for an indicator function."""


class ResolutionError(NonlocError, ValueError):
    """The grid does not resolve the requested kernel scale."""


class FitError(NonlocError, RuntimeError):
    """An extrapolation or least-squares fit is ill-posed."""


class ConeOverlapError(NonlocError, ValueError):
    """Cones around the probe basis are not pairwise disjoint."""


class ConstructionError(NonlocError, RuntimeError):
    """A mollifier or auxiliary object could not be built."""


class NoCertifyingDeltaError(NonlocError, RuntimeError):
    """No radius certifies the kernel lower bound for the requested epsilon."""
