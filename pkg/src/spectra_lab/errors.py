"""Exception hierarchy shared by all modules."""


class SpectraError(Exception):
    """Base class for every error raised by spectra_lab."""


class DomainError(SpectraError, ValueError):
    """Input outside the supported domain of an operation."""


class ConvergenceError(SpectraError, RuntimeError):
    """An iterative method hit its iteration cap."""


class TruncationError(SpectraError):
    """A truncated spectrum or grid is too short for the requested query."""


class ShootingError(SpectraError, RuntimeError):
    """An ODE shooting run did not produce the requested event."""


class InconsistentVerdict(SpectraError):
    """Two stability criteria disagree beyond their tolerance band."""
