"""Exception taxonomy shared by all floydlab modules."""


class FloydlabError(Exception):
    """Base class for all errors raised by this package."""


# graph_core

class DisconnectedGraph(FloydlabError):
    """Edge list does not describe a single connected component containing the base."""


class SelfLoop(FloydlabError):
    """Edge list contains an edge from a vertex to itself."""


class RadiusMismatch(FloydlabError):
    """Some vertex lies farther from the base than the declared radius."""


class RadiusOutOfRange(FloydlabError):
    """Requested sphere radius is negative or exceeds the ball radius."""


class ParseError(FloydlabError):
    """Graph file is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConsistencyError(FloydlabError):
    """Graph file parsed but the described graph violates ball invariants."""


# group_models

class BallTooLarge(FloydlabError):
    """Ball enumeration exceeded the configured vertex cap."""


class ModelAxiomViolation(FloydlabError):
    """Group model arithmetic failed a consistency spot-check."""


# floyd_metric

class TableExhausted(FloydlabError):
    """Custom Floyd table does not cover the requested argument."""


class ConditionAViolated(FloydlabError):
    """Floyd function ratio f(n)/f(n+1) dropped below 1 on the checked range."""


class RadiusOutOfMargin(FloydlabError):
    """Sphere radius too close to the ball boundary for the margin policy."""


class SampleExhausted(FloydlabError):
    """No qualifying quasi-geodesic samples were found; estimate inconclusive."""


# divergence

class PreconditionViolated(FloydlabError):
    """Divergence triple violates d(c, {a, b}) > 0."""


class MarginViolated(FloydlabError):
    """Requested divergence range exceeds ball radius / margin."""


class InsufficientData(FloydlabError):
    """Too few finite samples to fit a growth exponent."""


class RangeMismatch(FloydlabError):
    """Criterion range not covered by the supplied divergence samples."""


# quasigeodesic

class NonPath(FloydlabError):
    """Vertex sequence has a non-adjacent consecutive pair."""


class BadRadii(FloydlabError):
    """Escape search called with inner radius >= outer radius."""


class SegmentTooLong(FloydlabError):
    """Requested witness segment cannot fit inside the ball."""


# thickness

class StructureDepthMismatch(FloydlabError):
    """Claimed thickness order is inconsistent with the nesting of substructures."""
