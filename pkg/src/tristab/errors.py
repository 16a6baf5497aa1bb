class TristabError(Exception):
    """Base class for all library errors."""


class DomainError(TristabError, ValueError):
    """Input outside the domain of an operation."""


class DimensionError(DomainError):
    """Vectors of mismatched length."""


class NotApplicableError(DomainError):
    """The requested construction does not exist for these parameters."""


class RangeError(TristabError):
    """A finite enumeration is too short to certify the requested result."""
