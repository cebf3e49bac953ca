# Notes:
#   Exception hierarchy shared by every package of the simulator. Each error carries
#   an "[ERROR]" prefixed message, the convention used across the repository.
#
# Purpose:
#   To let callers (mostly the CLI) tell configuration problems apart from engine
#   bookkeeping bugs and map them to distinct exit codes.

from __future__ import annotations

from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


# Reputation engine


class ReputationError(SimulationError):
    pass


class CounterViolation(ReputationError):
    """NPF would exceed NPRF: an engine bookkeeping bug."""


class NoPunishmentPending(ReputationError):
    """A sanctioned drop was observed for an entry whose BP is already zero."""


class EmptySamples(ReputationError):
    pass


class DuplicateNode(ReputationError):
    pass


# Routing


class RoutingError(SimulationError):
    pass


class BrokenReversePath(RoutingError):
    pass


class NotOnRoute(RoutingError):
    pass


# Topology


class TopologyError(SimulationError):
    pass


class NotASquare(TopologyError):
    pass


class UnsupportedK(TopologyError):
    pass


# Metrics


class MetricsError(SimulationError):
    pass


class CountInversion(MetricsError):
    pass


class MissingColumns(MetricsError):
    pass


# Configuration


class ConfigError(SimulationError):
    """Base for config errors; `line` is the 1-based line of the offending entry."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"[ERROR] {message}{where}")


class UnknownKey(ConfigError):
    pass


class MalformedValue(ConfigError):
    pass


class InvalidConfig(ConfigError):
    pass
