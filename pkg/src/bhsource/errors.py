"""Exception taxonomy shared across the package.

Value-level problems (bad arguments, malformed files) derive from
``ValueError``; runtime numerical failures derive from ``RuntimeError`` so
callers can distinguish "you passed something wrong" from "the data did not
cooperate".
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(ValueError):
    """Evaluation requested exactly at a singular point (e.g. a source)."""


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


class DataFormatError(ValueError):
    """Malformed measurement or field file."""


class GeometryError(ValueError):
    """Sensor-geometry precondition violated (collinear / coplanar)."""


class EvaluationError(RuntimeError):
    """An indicator produced a non-finite value at a named grid node."""


class ConditioningError(RuntimeError):
    """A linear solve or ratio is too ill-conditioned to trust."""


class InversionError(RuntimeError):
    """A scalar inversion failed (no admissible solution in range)."""


class DegenerateDataError(RuntimeError):
    """Measured data is inconsistent with the assumed exponential-sum model."""


class AmbiguityError(RuntimeError):
    """Phase wrap-around makes the distance reconstruction ambiguous."""
