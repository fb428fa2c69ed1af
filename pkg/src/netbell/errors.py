"""Exception types shared across the package."""


class NetbellError(Exception):
    """Base class for all package errors."""


class InvalidParameter(NetbellError, ValueError):
    """A parameter is outside its documented domain."""


class DimensionMismatch(NetbellError, ValueError):
    """Operand shapes or subsystem dimensions do not agree."""


class InvalidOperand(NetbellError, ValueError):
    """An operand violates a structural requirement (e.g. not Hermitian)."""


class CapacityError(NetbellError):
    """The requested computation exceeds the supported size."""


class NotApplicable(NetbellError):
    """The operation is not defined for the given scenario."""


class DegenerateRealization(NetbellError):
    """A realization has a vanishing norm where a normalization is needed."""
