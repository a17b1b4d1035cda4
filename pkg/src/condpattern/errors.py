class InvalidInput(ValueError):
    """Raised for out-of-domain arguments (non-finite angles, bad ranges, NaN data)."""


class InvalidParameter(InvalidInput):
    """Raised when a fit model receives a non-physical parameter (width or period <= 0)."""


class InvalidState(RuntimeError):
    """Raised when an operation is asked to use a result it cannot trust."""
