"""Exception types shared across the package."""


class MagicRouteError(Exception):
    """Base class for all package errors."""


class DimensionError(MagicRouteError, ValueError):
    """Operands act on incompatible numbers of qubits."""


class ParseError(MagicRouteError, ValueError):
    """Malformed text or JSON input."""


class ZeroAmplitudeError(MagicRouteError):
    """Post-selection onto an outcome that has probability zero."""


class InvariantViolation(MagicRouteError):
    """An internal consistency check failed."""


class OracleCapExceeded(MagicRouteError):
    """A dense computation was requested above the configured qubit cap."""
