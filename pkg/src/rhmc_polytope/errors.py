"""Exception hierarchy shared across the package."""


class RHMCError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RHMCError):
    """Malformed polytope text or builtin fixture spec."""


class InvalidDimension(RHMCError):
    """Requested fixture dimensions are inconsistent."""


class RankDeficient(RHMCError):
    """Constraint matrix does not have full column rank."""


class InfeasibleInterior(RHMCError):
    """No strictly interior point could be found."""


class NoInteriorPoint(InfeasibleInterior):
    """Damped Newton failed to produce a strictly interior analytic center."""


class NotInterior(RHMCError):
    """A point has a non-positive (or numerically vanishing) slack."""


class FactorizationFailure(RHMCError):
    """Cholesky factorization of the metric broke down."""


class FixedPointDivergence(RHMCError):
    """An implicit integrator stage left the polytope or did not converge."""


class OracleNotConverged(RHMCError):
    """Reference flow failed its Richardson self-check."""


class DomainError(RHMCError):
    """Input outside the mathematical domain of a diagnostic."""


class InsufficientSamples(RHMCError):
    """Too few samples for a statistical diagnostic."""
