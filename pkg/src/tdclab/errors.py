"""Typed errors raised by the library.

Every failure mode that callers are expected to handle gets its own class;
the CLI maps these onto exit codes (invalid arguments -> 2, infeasible or
degenerate inputs -> 3, I/O -> 4).
"""

__all__ = [
    "TdcLabError",
    "InvalidArgument",
    "DegenerateInstance",
    "NotErgodic",
    "SingularOperator",
    "NotNegativeDefinite",
    "HorizonExceeded",
    "PlanInfeasible",
    "UnknownPreset",
    "InsufficientData",
    "NonpositiveError",
]


class TdcLabError(Exception):
    """Base class for all library errors."""


class InvalidArgument(TdcLabError):
    """An argument violates a documented precondition."""


class DegenerateInstance(TdcLabError):
    """Instance generation kept producing unusable problems (rank loss or
    a badly behaved behavior chain) after the retry budget."""


class NotErgodic(TdcLabError):
    """The chain has no unique stationary distribution reachable from all
    starts, or mixing did not complete within the iteration cap."""


class SingularOperator(TdcLabError):
    """A linear operator that must be inverted is singular or so badly
    conditioned (estimate above 1e12) that its inverse is meaningless."""


class NotNegativeDefinite(TdcLabError):
    """A matrix whose symmetric part must have negative spectrum does not."""


class HorizonExceeded(TdcLabError):
    """A requested time index lies outside the schedule's planned horizon."""


class PlanInfeasible(TdcLabError):
    """Blockwise planning drove a stepsize below the feasibility floor."""


class UnknownPreset(TdcLabError):
    """No experiment preset registered under the requested name."""


class InsufficientData(TdcLabError):
    """Too few points for the requested fit."""


class NonpositiveError(TdcLabError):
    """A log-scale fit was asked to take the log of a nonpositive error."""
