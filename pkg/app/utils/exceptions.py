"""
Custom exception classes for detection errors and command exit handling.
"""

from typing import Any, Dict, Optional


class SensorGuardException(Exception):
    """Base exception class for the detection engine."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class InvalidFrameException(SensorGuardException):
    """Raised when a condition frame or session violates its invariants."""

    pass


class StateRangeException(SensorGuardException):
    """Raised when a state id lies outside [0, 2^n)."""

    pass


class EmptyTraceException(SensorGuardException):
    """Raised when a raw sensor trace holds no readings."""

    pass


class UnknownChannelException(SensorGuardException):
    """Raised when a reading names a channel missing from the catalog."""

    pass


class InsufficientDataException(SensorGuardException):
    """Raised when input is too short or empty for the requested operation."""

    pass


class InvalidTrainingDataException(SensorGuardException):
    """Raised when a training corpus contains non-benign or unusable sessions."""

    pass


class MissingActivityException(SensorGuardException):
    """Raised when a benign activity has no training sessions."""

    pass


class MissingInitialDistributionException(SensorGuardException):
    """Raised when a transition model has no initial distribution."""

    pass


class ScoringException(SensorGuardException):
    """Raised when a session cannot be scored; details carry the session id."""

    pass


class UnknownScenarioException(SensorGuardException):
    """Raised when a threat scenario id is not 1, 2 or 3."""

    pass


class InvalidGenConfigException(SensorGuardException):
    """Raised when generation parameters cannot produce the requested sessions."""

    pass


class MetricsException(SensorGuardException):
    """Raised when metrics cannot be computed from the given verdicts."""

    pass


class SplitException(SensorGuardException):
    """Raised when a corpus cannot be split as requested."""

    pass


class ModelFormatException(SensorGuardException):
    """Raised when a model file is malformed or has an unsupported version."""

    pass


class ThresholdTypeException(SensorGuardException):
    """Raised when a threshold does not fit the detector kind."""

    pass


class FileFormatException(SensorGuardException):
    """Raised when a frames or raw trace file is malformed."""

    pass


class CommandExit(Exception):
    """Carries an exit code and message from a command handler to main()."""

    def __init__(self, exit_code: int, message: str, details: Optional[Dict[str, Any]] = None):
        self.exit_code = exit_code
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


def create_exit_error(
    exit_code: int, message: str, details: Optional[Dict[str, Any]] = None
) -> CommandExit:
    """Create a standardized command exit error."""
    return CommandExit(exit_code=exit_code, message=message, details=details)
