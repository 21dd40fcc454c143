"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class ObsNetError(Exception):
    """Base class for all library errors."""


class GraphFormatError(ObsNetError, ValueError):
    """A graph document is malformed or violates the network model."""


class InfeasibleError(ObsNetError):
    """The requested design or computation has no solution.

    ``sensor`` names the node that witnessed the infeasibility when one exists.
    """

    def __init__(self, message: str, sensor: str | None = None, node: str | None = None):
        super().__init__(message)
        self.sensor = sensor
        self.node = node


class EnumerationBoundError(ObsNetError):
    """An exhaustive routine was asked to enumerate beyond its documented bound."""


class UnobservableError(ObsNetError):
    """The observability matrix is rank deficient, so the state is not identifiable."""


class InconsistentTraceError(ObsNetError):
    """An output trace admits no initial state under the given system."""


class RetriesExhaustedError(ObsNetError):
    def __init__(self, message: str, trials: int):
        super().__init__(message)
        self.trials = trials
