"""Exception types raised by the simulator."""


class IsacSimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(IsacSimError):
    """Malformed, unknown, or out-of-range configuration input."""


class PlacementInfeasible(IsacSimError):
    """Node placement could not satisfy minimum-distance constraints."""


class NoFaceCovers(IsacSimError):
    """An angle-dependent scattering model has no face covering an angle."""


class DistanceOutOfRange(IsacSimError):
    """Path-loss query below the validity range of the curve."""


class UnsupportedScenario(IsacSimError):
    """No line-of-sight or path-loss model is defined for the scenario."""


class DegenerateGeometry(IsacSimError):
    """Coincident points where a direction or delay is undefined."""


class EmptyPathSet(IsacSimError):
    """An operation that needs at least one path received none."""


class TooManyShared(IsacSimError):
    """Requested shared-cluster count exceeds an input cluster count."""


class InconsistentLink(IsacSimError):
    """Channel parts built for different links were combined."""
