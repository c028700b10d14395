"""Exception hierarchy. Every error carries a machine-parseable tag and the
process exit code the CLI maps it to."""


class PhasecastError(Exception):
    """Base class for all phasecast errors."""

    tag = "E_INTERNAL"
    exit_code = 1


class DomainError(PhasecastError, ValueError):
    """Numeric argument outside its documented domain."""

    tag = "E_DOMAIN"
    exit_code = 4


class ShapeError(PhasecastError, ValueError):
    """Array argument with the wrong length or shape."""

    tag = "E_SHAPE"
    exit_code = 4


class ConfigError(PhasecastError, ValueError):
    """Invalid configuration value or combination."""

    tag = "E_CONFIG"
    exit_code = 3


class TraceError(PhasecastError):
    """Unreadable, unparseable, or empty input trace."""

    tag = "E_INPUT"
    exit_code = 2


class WindowError(PhasecastError):
    """Not enough trailing history to form a prediction window."""

    tag = "E_WINDOW"
    exit_code = 2


class ModelFormatError(PhasecastError):
    """Model file missing, malformed, or of an unsupported version."""

    tag = "E_MODEL"
    exit_code = 2


class EvaluationError(PhasecastError):
    """Fitness or metric evaluation produced an invalid number."""

    tag = "E_EVAL"
    exit_code = 4
