"""Exception hierarchy shared across the toolkit.

Exit-code mapping used by the CLI: ParameterError/InputError -> 2,
TransportError -> 3, RemoteError/ProtocolError/NumericError -> 4.
"""


class EvoxplainError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(EvoxplainError, ValueError):
    """Invalid parameter or configuration value."""


class InputError(EvoxplainError, ValueError):
    """Invalid input data (dimension mismatch, bad file, non-finite values)."""


class TransportError(EvoxplainError):
    """Remote classifier unreachable or timed out."""


class RemoteError(EvoxplainError):
    """Remote classifier answered with a non-200 status."""


class ProtocolError(EvoxplainError):
    """Remote classifier answered 200 but the payload violates the wire contract."""


class NumericError(EvoxplainError):
    """A numeric procedure failed (singular system, invalid distribution)."""
