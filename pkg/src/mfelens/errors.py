"""Exception types raised across the package.

Most derive from ValueError so that callers used to numpy-style argument
checking can catch them generically; the CLI maps each type to a stable
machine-readable error code.
"""


class SimulationError(Exception):
    """Base class for failures during a simulation task."""

    code = "simulation"


class DomainError(SimulationError, ValueError):
    """A coordinate or parameter lies outside its admissible range."""

    code = "domain"


class EmptyBasisError(SimulationError, ValueError):
    """A frequency window admits no cavity mode."""

    code = "empty-basis"


class DimensionMismatchError(SimulationError, ValueError):
    """Arrays that must share a basis or atom count do not."""

    code = "dimension-mismatch"


class QuadratureError(SimulationError):
    """A quadrature error estimate exceeded its tolerance."""

    code = "quadrature"


class EmptyWindowError(SimulationError, ValueError):
    """A time window contains no simulation samples."""

    code = "empty-window"


class RejectionOverflowError(SimulationError):
    """Position sampling kept landing outside the lens (acceptance too low)."""

    code = "rejection-overflow"


class CapacityError(SimulationError):
    """A state enumeration would exceed its configured cap."""

    code = "capacity"


class NormDriftError(SimulationError):
    """Propagation lost unitarity beyond tolerance."""

    code = "norm-drift"

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConfigError(SimulationError, ValueError):
    """Configuration text failed to parse or validate."""

    code = "config"

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
