"""Exception hierarchy shared by every module."""


class IcryptError(Exception):
    """Base class for all library errors."""


class ParameterError(IcryptError, ValueError):
    """Invalid key-generation or call parameters."""


class DomainError(IcryptError, ValueError):
    """An operation was applied outside its mathematical domain (e.g. inverting 0)."""


class SingularMatrixError(DomainError):
    pass


class EvaluationError(DomainError):
    """A rational monomial was evaluated at a non-invertible coordinate."""


class UnsupportedRingError(IcryptError):
    """The requested algorithm does not run over this ring."""


class NotFoundError(IcryptError, LookupError):
    """A bounded search finished without a result."""


class ResourceError(IcryptError):
    """A configured combinatorial budget would be exceeded."""


class InvalidCiphertextError(IcryptError, ValueError):
    pass


class InvalidKeyError(IcryptError, ValueError):
    pass


class AttackFailed(IcryptError):
    """An attack ran to completion without breaking the instance."""
