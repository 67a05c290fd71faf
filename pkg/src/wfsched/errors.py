"""Exception hierarchy shared across the package."""

from __future__ import annotations


class SchedulingError(Exception):
    """Base class for every error raised by wfsched."""


class ModelError(SchedulingError, ValueError):
    """Malformed or invariant-violating workflow / cluster input."""


class CycleError(ModelError):
    """The dependency relation contains a cycle.

    ``residual`` holds every task id left over once Kahn's algorithm stalls;
    ``cycle`` is one concrete cycle inside that residual graph.
    """

    def __init__(self, residual: list[str], cycle: list[str]) -> None:
        self.residual = residual
        self.cycle = cycle
        super().__init__(f"dependency cycle through tasks {', '.join(cycle)}")


class MappingError(SchedulingError, ValueError):
    """A mapping is not a total, class-respecting task -> node function."""


class InfeasibleError(SchedulingError):
    """Some task has no node it may legally run on."""


class CapExceededError(SchedulingError):
    """An exact search would exceed its configured size limit."""


class ConfigError(SchedulingError, ValueError):
    """Heuristic or objective configuration outside its documented range."""


class TraceError(SchedulingError, ValueError):
    """Malformed carbon-intensity trace or telemetry document."""


class EmptyClusterError(SchedulingError):
    """Anomaly filtering removed every node."""
