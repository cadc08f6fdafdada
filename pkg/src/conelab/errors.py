"""Exception types raised by conelab."""


class ConelabError(Exception):
    """Base class for all library errors."""


class UnsupportedDimensionError(ConelabError):
    pass


class PreconditionError(ConelabError):
    pass


class DivergenceError(PreconditionError):
    """The exponential rate of the density beats the kernel decay."""


class QuadratureSpecError(ConelabError):
    pass


class GeometryError(ConelabError):
    pass


class WindowError(ConelabError):
    pass


class ConfigError(ConelabError):
    pass
