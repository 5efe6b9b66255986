"""Exception hierarchy.

Every domain failure derives from :class:`TransitError`; the CLI maps those to
exit code 1 and everything else to a crash.
"""

from __future__ import annotations

from typing import Any


class TransitError(Exception):
    """Base class for all domain errors raised by this package."""


# --- graph substrate -------------------------------------------------------


class GraphSyntaxError(TransitError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CycleDetected(TransitError):
    def __init__(self, cycle: list[str]):
        super().__init__("cycle detected: " + " -> ".join(cycle + cycle[:1]))
        self.cycle = cycle


class DuplicateVertexLabel(TransitError):
    pass


class SelfLoop(TransitError):
    pass


class UnknownVertex(TransitError):
    pass


# --- transit clusters ------------------------------------------------------


class EmptyCluster(TransitError):
    pass


class ClusterIsWholeGraph(TransitError):
    pass


class GraphNotConnected(TransitError):
    pass


class NotATransitCluster(TransitError):
    def __init__(self, message: str, verdict: Any = None):
        super().__init__(message)
        self.verdict = verdict


class LabelCollision(TransitError):
    pass


class NotDisjoint(TransitError):
    pass


# --- enumeration -----------------------------------------------------------


class InventoryGraphMismatch(TransitError):
    pass


class GraphTooLargeForOracle(TransitError):
    pass


# --- peripheral extension --------------------------------------------------


class ExtensionError(TransitError):
    """Base for rewriting failures; ``step`` is set when raised during replay."""

    step: int | None = None


class OpPreconditionViolated(ExtensionError):
    pass


class WouldCreateCycle(ExtensionError):
    pass


class FreshLabelCollision(ExtensionError):
    pass


class NotConstructible(ExtensionError):
    """The cluster cannot be rebuilt from a single vertex with the ten operations."""


class TraceSyntaxError(ExtensionError):
    pass


# --- causal layer ----------------------------------------------------------


class InvalidCausalDiagram(TransitError):
    pass


class LatentHasParent(InvalidCausalDiagram):
    pass


class LatentTooManyChildren(InvalidCausalDiagram):
    pass


class LatentChildLatent(InvalidCausalDiagram):
    pass


class SetsOverlap(TransitError):
    pass


class QueryOutsideObserved(TransitError):
    pass


class ClusterIntersectsQuery(TransitError):
    pass
