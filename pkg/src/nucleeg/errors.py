"""Exception hierarchy shared by the library and the command line."""


class NucleegError(Exception):
    """Base class for all package errors."""


class ConfigError(NucleegError, ValueError):
    """Invalid parameters, flags or unresolvable names."""


class DataError(NucleegError, ValueError):
    """Input data violates a structural or numerical invariant."""


class DimensionMismatchError(DataError):
    pass


class NonFiniteError(DataError):
    pass


class NotPSDError(DataError):
    pass


class DecompositionError(NucleegError, RuntimeError):
    """The eigen/singular value routine failed to converge."""
