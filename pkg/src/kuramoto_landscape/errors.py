"""Exception hierarchy shared by the library and mapped onto CLI exit codes."""


class LandscapeError(Exception):
    """Base class for all library errors."""

    exit_code = 4


class PatternError(LandscapeError, ValueError):
    """Invalid pattern, point, or memory pair."""

    exit_code = 1


class MemorizedPattern(LandscapeError, ValueError):
    """A classification op received one of the stored memories (or an image)."""

    exit_code = 1


class NotMemoryCompatible(LandscapeError, ValueError):
    """The ternary point has neither the mid1 nor the mid2 shape."""

    exit_code = 1


class BoundaryCase(LandscapeError):
    """A strict inequality required by a closed-form result holds with equality."""

    exit_code = 3


class OutsideTheoremRange(BoundaryCase):
    """The coupling strength lies outside the range covered by a closed-form result."""


class NotSymmetric(LandscapeError, ValueError):
    exit_code = 4


class ConvergenceError(LandscapeError):
    exit_code = 4


class IntegrationError(LandscapeError):
    """A trajectory blew up or ended somewhere it was required not to."""

    exit_code = 4


class NotIndexOne(LandscapeError):
    exit_code = 4


class OracleDisagreement(LandscapeError):
    """Closed-form and numeric results differ beyond tolerance."""

    exit_code = 2

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class CensusCapExceeded(LandscapeError, ValueError):
    exit_code = 1


class ConfigError(LandscapeError, ValueError):
    """Unreadable or invalid run configuration."""

    exit_code = 1
