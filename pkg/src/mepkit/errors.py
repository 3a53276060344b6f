"""Exception types shared across the package."""


class MepkitError(Exception):
    """Base class for all mepkit errors."""


class SingularPointError(MepkitError):
    """A surface was evaluated at (or too close to) a singular point."""


class DegenerateLatticeError(MepkitError):
    """The lattice generators are (numerically) linearly dependent."""


class CollisionError(MepkitError):
    """Two interacting sites came closer than the collision threshold."""


class CriticalPointError(MepkitError):
    """Newton refinement of a critical point failed."""


class ZeroTangentError(MepkitError):
    """A selected finite difference of the path vanished."""


class PathDegenerationError(MepkitError):
    """Images of a path collided or the path has zero length."""


class ConvergenceFailure(MepkitError):
    """An evolution that had to converge did not."""


class SingularOperatorError(MepkitError):
    """The assembled linear operator is singular (stability failure)."""


class ConfigError(MepkitError):
    """A run configuration failed validation."""
